#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "framelab/config.hpp"
#include "framelab/errors.hpp"
#include "framelab/report.hpp"
#include "framelab/runner.hpp"

using namespace framelab;
using nlohmann::json;

namespace {

json load_document(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
}

/// Prints the failure record and, when the output directory is known, stores it as failure.json.
int fail(int code, const std::string& kind, const std::string& message, const std::string& out) {
    const json rec = {{"status", "error"}, {"exitCode", code}, {"kind", kind}, {"message", message}};
    std::cerr << rec.dump() << '\n';
    if (!out.empty()) {
        try {
            ensure_directory(out);
            write_json(out + "/failure.json", rec);
        } catch (const Error&) {
        }
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"framelab: weighted energy and commutator experiments"};
    app.require_subcommand(1);
    std::string configPath, outDir;
    std::uint64_t seed = 0;
    int refine = 0;
    for (const char* mode : {"certify", "conserve", "evolve", "estimate", "commutator"}) {
        auto* sub = app.add_subcommand(mode);
        sub->add_option("--config", configPath, "JSON configuration file");
        sub->add_option("--out", outDir, "output directory");
        sub->add_option("--seed", seed, "64-bit seed");
        sub->add_option("--refine", refine, "run at K resolutions N, 3N/2, 2N, ...")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }
    const std::string mode = app.get_subcommands().front()->get_name();
    auto* sub = app.get_subcommands().front();

    Config cfg;
    try {
        json doc = load_document(configPath);
        if (!doc.is_object()) throw SchemaError("config: expected an object");
        doc["mode"] = mode;
        if (sub->count("--seed")) doc["seed"] = seed;
        if (sub->count("--out")) doc["out"] = outDir;
        cfg = parse_config(doc);
        if (refine > 0) {
            cfg.refine = refine_ladder(cfg.mode == Mode::Commutator ? cfg.sampling.n : cfg.grid.N, refine);
            validate(cfg);
        }
    } catch (const IoError& e) {
        return fail(kExitConfig, "IoError", e.what(), "");
    } catch (const Error& e) {
        return fail(kExitConfig, "ConfigError", e.what(), "");
    }

    try {
        const int code = run(cfg);
        std::cout << json{{"status", code == kExitOk ? "ok" : "certification-failure"},
                          {"mode", mode},
                          {"out", cfg.out},
                          {"exitCode", code}}
                         .dump()
                  << '\n';
        return code;
    } catch (const std::exception& e) {
        return fail(kExitRuntime, "RuntimeError", e.what(), cfg.out);
    }
}

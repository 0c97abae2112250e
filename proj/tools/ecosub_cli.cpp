#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ecosub/config.hpp"
#include "ecosub/errors.hpp"
#include "ecosub/jobs.hpp"

namespace fs = std::filesystem;
using namespace ecosub;

namespace {

struct Args {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::string preset;
    bool timing = false;
};

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// The subcommand fixes the job kind; a config naming a different one is an error.
JobConfig build_config(JobKind kind, const Args& a) {
    std::string text = a.config.empty() ? std::string() : read_text(a.config);
    YAML::Node doc;
    try {
        doc = text.empty() ? YAML::Node(YAML::NodeType::Map) : YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("config: syntax error at line {}, column {}: {}",
                                      e.mark.line + 1, e.mark.column + 1, e.msg));
    }
    if (!doc.IsMap()) throw ConfigError("config: top level must be a mapping");
    if (doc["job"] && doc["job"].as<std::string>() != job_name(kind))
        throw ConfigError(fmt::format("config asks for job '{}' but the command is '{}'",
                                      doc["job"].as<std::string>(), job_name(kind)));
    if (!a.preset.empty()) {
        if (doc["preset"] && doc["preset"].as<std::string>() != a.preset)
            throw ConfigError("--preset conflicts with the preset named in the config");
        doc["preset"] = a.preset;
    }
    doc["job"] = job_name(kind);
    YAML::Emitter em;
    em << doc;
    JobConfig c = parse_config(em.c_str());
    if (a.seed) c.simulation.seed = *a.seed;
    return c;
}

int run(JobKind kind, const Args& a) {
    JobConfig c = build_config(kind, a);
    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) throw IoError("cannot create output directory " + a.out + ": " + ec.message());
    RunOptions opt;
    opt.timing = a.timing;
    RunManifest m = run_job(c, a.out, opt);
    std::cout << fmt::format("{} {} -> {} ({})\n", m.job, m.status, a.out, m.config_hash);
    return m.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic subsidy competition with ecosystem complementarities"};
    app.require_subcommand(1);
    Args args;
    JobKind chosen = JobKind::Solve;

    auto* list = app.add_subcommand("presets", "List embedded presets, or print one");
    std::string show;
    list->add_option("name", show, "Preset to print");

    for (JobKind k : {JobKind::Solve, JobKind::Simulate, JobKind::Deviation, JobKind::Sweep,
                      JobKind::Region, JobKind::Welfare, JobKind::Signal, JobKind::Check}) {
        auto* sub = app.add_subcommand(job_name(k), "Run a " + job_name(k) + " job");
        sub->add_option("--config,-c", args.config, "YAML config file");
        sub->add_option("--out,-o", args.out, "Output directory");
        sub->add_option("--seed", args.seed, "Override simulation.seed");
        sub->add_option("--preset", args.preset, "Base preset");
        sub->add_flag("--timing", args.timing, "Record wall-clock time in the manifest");
        sub->callback([&chosen, k] { chosen = k; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (list->parsed()) {
            if (show.empty())
                for (const auto& n : preset_names()) std::cout << n << "\n";
            else
                std::cout << preset_text(show);
            return kExitOk;
        }
        return run(chosen, args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NotConverged& e) {
        std::cerr << "not converged: " << e.what() << "\n";
        return kExitNotConverged;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

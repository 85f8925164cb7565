// heislab: command-line front end over the experiment runner.
#include "heislab/experiment.hpp"
#include "heislab/hashing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

/// A flag value as JSON: numbers and JSON literals parse, anything else is a string.
json scalar(const std::string& s)
{
    try
    {
        return json::parse(s);
    }
    catch (const json::parse_error&)
    {
        return s;
    }
}

std::vector<std::string> split_commas(const std::vector<std::string>& raw)
{
    std::vector<std::string> out;
    for (const auto& r : raw)
    {
        if (!r.empty() && (r.front() == '{' || r.front() == '['))
        {
            out.push_back(r);
            continue;
        }
        std::stringstream ss(r);
        std::string part;
        while (std::getline(ss, part, ','))
            if (!part.empty())
                out.push_back(part);
    }
    return out;
}

/// Converts raw flag strings to the JSON shape the schema expects for that parameter.
json flag_value(const json& def, const std::vector<std::string>& raw)
{
    if (!def.is_array() && !def.is_object())
        return scalar(raw.back());
    if (raw.size() == 1 && !raw[0].empty() && (raw[0].front() == '[' || raw[0].front() == '{'))
        return scalar(raw[0]);
    json arr = json::array();
    for (const auto& p : split_commas(raw))
        arr.push_back(scalar(p));
    return arr;
}

std::string flag_name(std::string s)
{
    std::replace(s.begin(), s.end(), '_', '-');
    return "--" + s;
}

struct Leaf
{
    std::string command;
    CLI::App* app = nullptr;
    std::map<std::string, std::vector<std::string>> raw;  // param name -> values
};

void print_manifest(const heislab::RunManifest& m, const fs::path& out)
{
    std::cout << "manifest " << m.path.string() << '\n';
    for (const auto& t : m.tasks)
    {
        std::cout << "task " << t.name << ' ' << t.status;
        if (!t.cache.empty())
            std::cout << " (cache " << t.cache << ')';
        if (!t.message.empty())
            std::cout << ": " << t.message;
        std::cout << '\n';
    }
    for (const auto& a : m.artifacts)
        std::cout << "artifact " << (out / a).string() << '\n';
    // small primary records go to stdout as well
    for (const auto& a : m.artifacts)
        if (fs::path(a).extension() == ".json")
        {
            const fs::path p = out / a;
            std::error_code ec;
            if (fs::file_size(p, ec) < 4096 && !ec)
            {
                std::ifstream in(p);
                std::cout << in.rdbuf();
            }
            break;
        }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"heislab: Heisenberg-group, Hardy-space and Dixmier-trace experiments"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::string out = "heislab-out", cache, config_path;
    int jobs = 1;
    bool dry_run = false;
    auto* seed_opt = app.add_option("--seed", seed, "global seed");
    auto* out_opt = app.add_option("--out", out, "output directory")->capture_default_str();
    auto* jobs_opt = app.add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
    auto* cache_opt = app.add_option("--cache", cache, "spectrum cache directory (default <out>/cache)");
    app.add_option("--config", config_path, "JSON experiment config; flags given here override it")
        ->check(CLI::ExistingFile);
    app.add_flag("--dry-run", dry_run, "print the normalized config and its hash, run nothing");

    std::vector<Leaf> leaves;
    std::map<std::string, CLI::App*> groups;
    for (const auto& command : heislab::experiment_commands())
    {
        const auto space = command.find(' ');
        const std::string group = command.substr(0, space), name = command.substr(space + 1);
        if (!groups.count(group))
        {
            groups[group] = app.add_subcommand(group, group + " experiments");
            groups[group]->require_subcommand(1);
        }
        leaves.push_back({command, nullptr, {}});
    }
    // second pass: the vector no longer reallocates, so the raw maps can be bound
    for (auto& leaf : leaves)
    {
        const auto space = leaf.command.find(' ');
        leaf.app = groups[leaf.command.substr(0, space)]->add_subcommand(leaf.command.substr(space + 1));
        leaf.app->footer("parameters:\n" + heislab::command_help(leaf.command));
        const json defaults = heislab::command_defaults(leaf.command);
        for (const auto& [name, def] : defaults.items())
        {
            auto* opt = leaf.app->add_option(flag_name(name), leaf.raw[name], "default " + def.dump());
            if (def.is_array() || def.is_object())
                opt->allow_extra_args()->expected(1, 1 << 20);
            else
                opt->expected(1);
        }
    }

    auto* plot = app.add_subcommand("plot", "render a CSV artifact (or every CSV of a manifest) as SVG");
    std::string plot_path, plot_output;
    heislab::PlotRequest req;
    plot->add_option("path", plot_path, "CSV file or manifest JSON")->required();
    plot->add_option("--kind", req.kind, "auto | spectrum | lambda | scatter")
        ->check(CLI::IsMember({"auto", "spectrum", "lambda", "scatter"}));
    plot->add_option("--x", req.x, "scatter x column");
    plot->add_option("--y", req.y, "scatter y column");
    plot->add_flag("--logx", req.logx);
    plot->add_flag("--logy", req.logy);
    plot->add_flag("--gnuplot", req.gnuplot, "emit a gnuplot script instead of SVG");
    plot->add_option("-o,--output", plot_output, "output file (single CSV only)");

    auto* manifest = app.add_subcommand("manifest", "inspect run manifests");
    manifest->require_subcommand(1);
    auto* query = manifest->add_subcommand("query", "list runs in a directory");
    std::string query_dir;
    heislab::ManifestFilter filter;
    bool query_json = false;
    query->add_option("dir", query_dir, "directory (default --out)");
    query->add_option("--command", filter.command, "exact command, e.g. \"cc dist\"");
    query->add_option("--hash", filter.hash_prefix, "config hash prefix");
    query->add_option("--since", filter.since, "ISO date/time lower bound");
    query->add_option("--until", filter.until, "ISO date/time upper bound (prefix)");
    query->add_flag("--json", query_json, "one JSON manifest per line");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (plot->parsed())
        {
            req.output = plot_output;
            const fs::path p = plot_path;
            if (p.extension() == ".json")
            {
                for (const auto& f : heislab::plot_manifest(p, req))
                    std::cout << f.string() << '\n';
            }
            else
                std::cout << heislab::plot_csv(p, req).string() << '\n';
            return 0;
        }
        if (query->parsed())
        {
            std::vector<std::string> rejected;
            const auto list = heislab::manifest_query(query_dir.empty() ? fs::path(out) : fs::path(query_dir),
                                                      filter, &rejected);
            for (const auto& m : list)
            {
                if (query_json)
                    std::cout << heislab::to_json(m).dump() << '\n';
                else
                    std::cout << m.started << "  " << m.hash << "  " << m.config.value("command", "") << "  "
                              << (m.ok() ? "ok" : "failed") << "  " << m.artifacts.size() << " artifacts\n";
            }
            for (const auto& r : rejected)
                std::cerr << "skipped " << r << '\n';
            return 0;
        }

        heislab::ExperimentConfig cfg;
        json params = json::object();
        if (!config_path.empty())
        {
            std::ifstream in(config_path);
            json j;
            try
            {
                j = json::parse(in);
            }
            catch (const json::parse_error& e)
            {
                throw heislab::InputError(config_path + ": " + e.what());
            }
            cfg = heislab::config_from_json(j);
            params = cfg.params;
        }
        const Leaf* chosen = nullptr;
        for (const auto& leaf : leaves)
            if (leaf.app->parsed())
                chosen = &leaf;
        if (chosen)
        {
            if (!config_path.empty() && cfg.command != chosen->command)
                params = json::object();  // the config was for another command
            cfg.command = chosen->command;
            const json defaults = heislab::command_defaults(cfg.command);
            for (const auto& [name, raw] : chosen->raw)
                if (!raw.empty())
                    params[name] = flag_value(defaults.at(name), raw);
        }
        if (cfg.command.empty())
        {
            std::cerr << app.help();
            return 2;
        }
        cfg.params = heislab::normalize_params(cfg.command, params);
        if (seed_opt->count())
            cfg.seed = seed;
        if (out_opt->count() || config_path.empty())
            cfg.out = out;
        if (jobs_opt->count())
            cfg.jobs = jobs;
        if (cache_opt->count())
            cfg.cache = cache;

        if (dry_run)
        {
            std::cout << heislab::to_json(cfg).dump(2) << "\nhash " << heislab::hex64(heislab::config_hash(cfg)) << '\n';
            return 0;
        }
        const heislab::RunManifest m = heislab::run(cfg);
        print_manifest(m, cfg.out);
        return m.ok() ? 0 : 1;
    }
    catch (const heislab::InputError& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const heislab::NumericError& e)
    {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 1;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

///
/// \file experiment.hpp
///
/// Experiment configs, the runner behind the CLI, run manifests and plot emission.
///
#ifndef HEISLAB_EXPERIMENT_HPP
#define HEISLAB_EXPERIMENT_HPP

#include "heislab/error.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace heislab
{

inline constexpr const char* heislab_version = "0.1.0";

///
/// One experiment. `params` is validated against the command's schema and has every
/// default filled in, so two configs that run the same numbers compare equal.
///
struct ExperimentConfig
{
    std::string command;  ///< e.g. "cc dist", "dixmier bounds"
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::filesystem::path out = "heislab-out";
    int jobs = 1;
    std::filesystem::path cache;  ///< empty: <out>/cache
};

/// Every command the runner knows, in help order.
const std::vector<std::string>& experiment_commands();

/// Default parameter record of a command. InputError for an unknown command.
nlohmann::json command_defaults(const std::string& command);

/// One line per parameter: name, type, default.
std::string command_help(const std::string& command);

///
/// Strict validation: unknown keys, wrong types and out-of-range values throw
/// InputError; missing keys take their defaults. Returns the filled record.
///
nlohmann::json normalize_params(const std::string& command, const nlohmann::json& params);

/// Parses {"command", "params", "seed", "out", "jobs", "cache"}; unknown keys rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Full record, including out/jobs/cache.
nlohmann::json to_json(const ExperimentConfig& c);

/// The part that determines the numbers: command, params, seed.
nlohmann::json hashed_part(const ExperimentConfig& c);

/// FNV-1a of the canonical dump of hashed_part.
std::uint64_t config_hash(const ExperimentConfig& c);

struct TaskStatus
{
    std::string name;
    std::string status;   ///< "ok" or "failed"
    double seconds = 0.0;
    std::string message;  ///< error text for failed tasks
    std::string cache;    ///< "hit", "miss" or empty
};

struct RunManifest
{
    std::string hash;  ///< hex16 of config_hash
    nlohmann::json config;
    std::string version;
    std::vector<TaskStatus> tasks;
    std::vector<std::string> artifacts;  ///< file names relative to the output directory
    std::string started;                 ///< UTC, ISO 8601
    double wall_seconds = 0.0;
    std::filesystem::path path;          ///< where the manifest was written or read

    bool ok() const;
};

nlohmann::json to_json(const RunManifest& m);

/// InputError when fields are missing or the hash does not match the stored config.
RunManifest manifest_from_json(const nlohmann::json& j);

///
/// Runs the experiment. Artifacts are buffered and written by this thread after all
/// tasks finish; the manifest <out>/manifest-<hash16>.json is written last. Numeric
/// failures are recorded per task and do not throw; input errors do.
///
RunManifest run(const ExperimentConfig& config);

struct ManifestFilter
{
    std::string command;      ///< exact match, empty = any
    std::string hash_prefix;  ///< empty = any
    std::string since;        ///< ISO prefix compare against `started`, empty = any
    std::string until;
};

///
/// Manifests in dir matching the filter, oldest first. Files that fail to parse or
/// whose hash does not match are reported in `rejected` when given. An unreadable or
/// missing directory is an InputError.
///
std::vector<RunManifest> manifest_query(const std::filesystem::path& dir, const ManifestFilter& filter = {},
                                        std::vector<std::string>* rejected = nullptr);

struct PlotRequest
{
    std::string kind = "auto";  ///< auto | spectrum | lambda | scatter
    std::string x, y;           ///< scatter columns
    bool logx = false, logy = false;
    bool gnuplot = false;       ///< emit a gnuplot script instead of SVG
    std::filesystem::path output;  ///< empty: next to the CSV
};

///
/// Renders one CSV. Missing file, unknown columns and empty tables are InputErrors, and
/// nothing is written in that case. Returns the written path.
///
std::filesystem::path plot_csv(const std::filesystem::path& csv, const PlotRequest& req = {});

/// Plots every CSV artifact of a manifest whose kind can be detected.
std::vector<std::filesystem::path> plot_manifest(const std::filesystem::path& manifest, const PlotRequest& req = {});

} // namespace heislab

#endif

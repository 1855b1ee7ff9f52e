#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "berrt/planner.hpp"

namespace berrt {

/// A batch size given either absolutely ("100") or relative to N ("n/100").
struct BatchSize {
  std::size_t value = 1;
  std::size_t divisor = 0;  // nonzero: N / divisor, at least 1

  std::size_t resolve(std::size_t n) const;
  std::string label() const;
  friend bool operator==(const BatchSize&, const BatchSize&) = default;
};

/// Throws std::invalid_argument on malformed tokens or a zero value.
BatchSize parse_batch_size(std::string_view token);

struct TrialSpec {
  std::filesystem::path scenario;
  std::vector<std::size_t> samples;
  std::vector<BatchSize> batches;
  std::vector<BackendKind> backends{BackendKind::kSerial};
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  double epsilon = 1e-6;
  std::size_t workers = 0;
  bool validate = false;
};

struct RunRecord {
  std::string scenario;
  std::size_t n_samples = 0;
  std::size_t batch_size = 0;
  std::string backend;
  std::size_t workers = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "skipped"
  std::string message;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t replans = 0;
  std::size_t policy_iterations = 0;
  std::size_t max_policy_iterations = 0;
  double path_cost = kInfinity;
  double explore_time = 0.0;
  double exploit_time = 0.0;
  double rebuild_time = 0.0;
  double total_time = 0.0;
  bool monotone = true;  // post-replan goal costs never increased
  std::vector<double> replan_times;
  std::vector<std::size_t> replan_iterations;
  std::vector<double> goal_costs;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Seed of one cell. The backend is deliberately not mixed in, so every
/// backend replays the same sample sequence for a given (N, S, trial).
std::uint64_t cell_seed(std::uint64_t base, std::size_t n, std::size_t s,
                        std::size_t trial);

/// Builds the record of one finished plan.
RunRecord make_record(const PlanResult& result, const PlannerConfig& config);

/// Runs every (N, S, backend, trial) cell sequentially. Cells with S > N
/// yield a "skipped" record. Throws ScenarioError if the scenario is invalid
/// and std::invalid_argument on an empty or inconsistent spec.
std::vector<RunRecord> run_matrix(
    const TrialSpec& spec,
    const std::function<void(const RunRecord&)>& progress = {});

struct SummaryRow {
  std::size_t n_samples = 0;
  std::size_t batch_size = 0;
  std::string backend;
  std::size_t trials = 0;
  double total_mean = 0.0, total_std = 0.0;
  double exploit_mean = 0.0, exploit_std = 0.0;
  double cost_mean = 0.0, cost_std = 0.0;
  std::optional<double> batch_speedup;      // vs S = 1, same N and backend
  std::optional<double> backend_speedup;    // vs serial, same N and S
  std::optional<double> reference_speedup;  // published S=100 figure at N=10^4
};

struct Crossover {
  std::size_t batch_size = 0;
  std::optional<std::size_t> n0;  // smallest N where parallel beats serial
};

struct Summary {
  std::vector<SummaryRow> rows;
  std::vector<Crossover> crossovers;
};

/// Per-cell mean and sample standard deviation of total time, exploit time
/// and path cost; speedups are ratios of mean total time. Skipped records
/// are ignored.
Summary summarize(const std::vector<RunRecord>& records);

enum class Format { kCsv, kJson };

Format parse_format(std::string_view name);

/// Column order of the CSV output.
const std::vector<std::string>& csv_columns();

std::string to_csv(const std::vector<RunRecord>& records);
std::string to_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> parse_csv(std::string_view text);
std::vector<RunRecord> parse_json(std::string_view text);

/// Writes the records to `path`; throws std::ios_base::failure if the file
/// cannot be written.
void emit(const std::vector<RunRecord>& records, Format format,
          const std::filesystem::path& path);
std::vector<RunRecord> read_records(const std::filesystem::path& path,
                                    Format format);

std::string summary_csv(const Summary& summary);

}  // namespace berrt

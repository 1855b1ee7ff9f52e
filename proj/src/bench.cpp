#include "berrt/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

namespace berrt {
namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s, std::string_view column) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "' in column " +
                                std::string(column));
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view column) {
  Int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument("bad integer '" + std::string(s) + "' in column " +
                                std::string(column));
  }
  return v;
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += fmt(values[i]);
  }
  return out;
}

template <typename T, typename F>
std::vector<T> split(std::string_view s, F&& parse) {
  std::vector<T> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(';', start);
    out.push_back(parse(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Splits CSV text into rows of fields; quoted fields may contain separators,
// doubled quotes and newlines.
std::vector<std::vector<std::string>> csv_rows(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double number_from(const nlohmann::json& j) {
  return j.is_null() ? kInfinity : j.get<double>();
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += (x - mean) * (x - mean);
  return std::sqrt(sum / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::size_t BatchSize::resolve(std::size_t n) const {
  if (divisor == 0) return value;
  return std::max<std::size_t>(1, n / divisor);
}

std::string BatchSize::label() const {
  return divisor == 0 ? std::to_string(value) : "n/" + std::to_string(divisor);
}

BatchSize parse_batch_size(std::string_view token) {
  BatchSize out;
  std::string_view digits = token;
  const bool relative = token.size() > 2 && (token[0] == 'n' || token[0] == 'N') &&
                        token[1] == '/';
  if (relative) digits = token.substr(2);
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (digits.empty() || ec != std::errc() || end != digits.data() + digits.size() ||
      v == 0) {
    throw std::invalid_argument("invalid batch size '" + std::string(token) +
                                "' (expected a positive integer or n/<k>)");
  }
  if (relative) {
    out.divisor = v;
  } else {
    out.value = v;
  }
  return out;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t n, std::size_t s,
                        std::size_t trial) {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ n);
  h = mix64(h ^ s);
  h = mix64(h ^ trial);
  return h;
}

RunRecord make_record(const PlanResult& result, const PlannerConfig& config) {
  RunRecord r;
  r.n_samples = config.n_samples;
  r.batch_size = config.batch_size;
  r.backend = std::string(to_string(config.backend));
  r.workers = config.backend == BackendKind::kParallel
                  ? (config.workers ? config.workers : default_worker_count())
                  : 1;
  r.seed = config.seed;
  r.vertices = result.vertices.size();
  r.edges = result.edges.size();
  r.replans = result.per_replan.size();
  r.path_cost = result.path_cost;
  r.explore_time = result.totals.explore;
  r.exploit_time = result.totals.exploit;
  r.rebuild_time = result.totals.rebuild;
  r.total_time = result.totals.total;
  for (const ReplanStats& st : result.per_replan) {
    r.policy_iterations += st.iterations;
    r.max_policy_iterations = std::max(r.max_policy_iterations, st.iterations);
    r.replan_times.push_back(st.wall_time);
    r.replan_iterations.push_back(st.iterations);
    if (!r.goal_costs.empty() && st.goal_cost > r.goal_costs.back()) {
      r.monotone = false;
    }
    r.goal_costs.push_back(st.goal_cost);
  }
  return r;
}

std::vector<RunRecord> run_matrix(const TrialSpec& spec,
                                  const std::function<void(const RunRecord&)>& progress) {
  if (spec.samples.empty()) throw std::invalid_argument("no sample counts given");
  if (spec.batches.empty()) throw std::invalid_argument("no batch sizes given");
  if (spec.backends.empty()) throw std::invalid_argument("no backends given");
  if (spec.trials == 0) throw std::invalid_argument("trials must be at least 1");
  for (std::size_t n : spec.samples) {
    if (n == 0) throw std::invalid_argument("sample counts must be positive");
  }

  const World world = load_scenario(spec.scenario);
  const double gamma = default_gamma(world);
  const std::string scenario = spec.scenario.string();

  std::vector<RunRecord> records;
  for (std::size_t n : spec.samples) {
    for (const BatchSize& batch : spec.batches) {
      const std::size_t s = batch.resolve(n);
      for (BackendKind backend : spec.backends) {
        for (std::size_t trial = 0; trial < spec.trials; ++trial) {
          PlannerConfig config;
          config.n_samples = n;
          config.batch_size = s;
          config.epsilon = spec.epsilon;
          config.gamma = gamma;
          config.seed = cell_seed(spec.seed, n, s, trial);
          config.backend = backend;
          config.workers = spec.workers;
          config.validate = spec.validate;

          RunRecord record;
          if (s > n) {
            record.n_samples = n;
            record.batch_size = s;
            record.backend = std::string(to_string(backend));
            record.seed = config.seed;
            record.status = "skipped";
            record.message = "batch size " + std::to_string(s) +
                             " exceeds sample count " + std::to_string(n);
            record.path_cost = kInfinity;
          } else {
            record = make_record(plan(world, config), config);
          }
          record.scenario = scenario;
          record.trial = trial;
          if (progress) progress(record);
          records.push_back(std::move(record));
        }
      }
    }
  }
  return records;
}

Summary summarize(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::size_t, std::size_t, std::string>;
  struct Samples {
    std::vector<double> total, exploit, cost;
  };
  std::map<Key, Samples> cells;
  for (const RunRecord& r : records) {
    if (r.status != "ok") continue;
    Samples& c = cells[{r.n_samples, r.batch_size, r.backend}];
    c.total.push_back(r.total_time);
    c.exploit.push_back(r.exploit_time);
    c.cost.push_back(r.path_cost);
  }

  Summary summary;
  std::map<Key, double> total_mean;
  for (const auto& [key, c] : cells) {
    SummaryRow row;
    std::tie(row.n_samples, row.batch_size, row.backend) = key;
    row.trials = c.total.size();
    row.total_mean = mean_of(c.total);
    row.total_std = std_of(c.total, row.total_mean);
    row.exploit_mean = mean_of(c.exploit);
    row.exploit_std = std_of(c.exploit, row.exploit_mean);
    row.cost_mean = mean_of(c.cost);
    row.cost_std = std_of(c.cost, row.cost_mean);
    total_mean[key] = row.total_mean;
    summary.rows.push_back(std::move(row));
  }

  for (SummaryRow& row : summary.rows) {
    if (auto it = total_mean.find({row.n_samples, 1, row.backend});
        it != total_mean.end()) {
      row.batch_speedup = it->second / row.total_mean;
    }
    if (auto it = total_mean.find({row.n_samples, row.batch_size, "serial"});
        it != total_mean.end()) {
      row.backend_speedup = it->second / row.total_mean;
    }
    if (row.n_samples == 10'000 && row.batch_size == 100) {
      row.reference_speedup = row.backend == "serial" ? 8.83 : 9.52;
    }
  }

  std::map<std::size_t, std::map<std::size_t, std::pair<double, double>>> pairs;
  for (const SummaryRow& row : summary.rows) {
    auto other = total_mean.find({row.n_samples, row.batch_size,
                                  row.backend == "serial" ? "parallel" : "serial"});
    if (row.backend != "serial" || other == total_mean.end()) continue;
    pairs[row.batch_size][row.n_samples] = {row.total_mean, other->second};
  }
  for (const auto& [s, by_n] : pairs) {
    Crossover cross{s, std::nullopt};
    for (const auto& [n, times] : by_n) {
      if (times.second < times.first) {
        cross.n0 = n;
        break;
      }
    }
    summary.crossovers.push_back(cross);
  }
  return summary;
}

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw std::invalid_argument("unknown format '" + std::string(name) +
                              "' (expected csv or json)");
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{
      "scenario", "n_samples", "batch_size", "backend", "workers", "trial",
      "seed", "status", "message", "vertices", "edges", "replans",
      "policy_iterations", "max_policy_iterations", "path_cost",
      "explore_time", "exploit_time", "rebuild_time", "total_time", "monotone",
      "replan_times", "replan_iterations", "goal_costs"};
  return columns;
}

std::string to_csv(const std::vector<RunRecord>& records) {
  std::string out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  auto num = [](double v) { return format_double(v); };
  auto count = [](std::size_t v) { return std::to_string(v); };
  for (const RunRecord& r : records) {
    const std::vector<std::string> fields{
        quote(r.scenario), count(r.n_samples), count(r.batch_size), quote(r.backend),
        count(r.workers), count(r.trial), std::to_string(r.seed), quote(r.status),
        quote(r.message), count(r.vertices), count(r.edges), count(r.replans),
        count(r.policy_iterations), count(r.max_policy_iterations),
        num(r.path_cost), num(r.explore_time), num(r.exploit_time),
        num(r.rebuild_time), num(r.total_time), r.monotone ? "1" : "0",
        join(r.replan_times, num), join(r.replan_iterations, count),
        join(r.goal_costs, num)};
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

std::vector<RunRecord> parse_csv(std::string_view text) {
  auto rows = csv_rows(text);
  if (rows.empty() || rows.front() != csv_columns()) {
    throw std::invalid_argument("CSV header does not match the record columns");
  }
  const auto& cols = csv_columns();
  std::vector<RunRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != cols.size()) {
      throw std::invalid_argument("CSV row " + std::to_string(i) + " has " +
                                  std::to_string(f.size()) + " fields");
    }
    auto sz = [&](std::size_t k) { return parse_int<std::size_t>(f[k], cols[k]); };
    auto dbl = [&](std::size_t k) { return parse_double(f[k], cols[k]); };
    RunRecord r;
    r.scenario = f[0];
    r.n_samples = sz(1);
    r.batch_size = sz(2);
    r.backend = f[3];
    r.workers = sz(4);
    r.trial = sz(5);
    r.seed = parse_int<std::uint64_t>(f[6], cols[6]);
    r.status = f[7];
    r.message = f[8];
    r.vertices = sz(9);
    r.edges = sz(10);
    r.replans = sz(11);
    r.policy_iterations = sz(12);
    r.max_policy_iterations = sz(13);
    r.path_cost = dbl(14);
    r.explore_time = dbl(15);
    r.exploit_time = dbl(16);
    r.rebuild_time = dbl(17);
    r.total_time = dbl(18);
    r.monotone = f[19] == "1";
    r.replan_times = split<double>(f[20], [&](std::string_view s) {
      return parse_double(s, cols[20]);
    });
    r.replan_iterations = split<std::size_t>(f[21], [&](std::string_view s) {
      return parse_int<std::size_t>(s, cols[21]);
    });
    r.goal_costs = split<double>(f[22], [&](std::string_view s) {
      return parse_double(s, cols[22]);
    });
    out.push_back(std::move(r));
  }
  return out;
}

std::string to_json(const std::vector<RunRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RunRecord& r : records) {
    nlohmann::json goal_costs = nlohmann::json::array();
    for (double g : r.goal_costs) goal_costs.push_back(number_or_null(g));
    arr.push_back({
        {"scenario", r.scenario},
        {"n_samples", r.n_samples},
        {"batch_size", r.batch_size},
        {"backend", r.backend},
        {"workers", r.workers},
        {"trial", r.trial},
        {"seed", r.seed},
        {"status", r.status},
        {"message", r.message},
        {"vertices", r.vertices},
        {"edges", r.edges},
        {"replans", r.replans},
        {"policy_iterations", r.policy_iterations},
        {"max_policy_iterations", r.max_policy_iterations},
        {"path_cost", number_or_null(r.path_cost)},
        {"explore_time", r.explore_time},
        {"exploit_time", r.exploit_time},
        {"rebuild_time", r.rebuild_time},
        {"total_time", r.total_time},
        {"monotone", r.monotone},
        {"replan_times", r.replan_times},
        {"replan_iterations", r.replan_iterations},
        {"goal_costs", goal_costs},
    });
  }
  return arr.dump(2) + "\n";
}

std::vector<RunRecord> parse_json(std::string_view text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw std::invalid_argument("expected a JSON array of records");
  std::vector<RunRecord> out;
  for (const auto& j : arr) {
    RunRecord r;
    r.scenario = j.at("scenario").get<std::string>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.batch_size = j.at("batch_size").get<std::size_t>();
    r.backend = j.at("backend").get<std::string>();
    r.workers = j.at("workers").get<std::size_t>();
    r.trial = j.at("trial").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.status = j.at("status").get<std::string>();
    r.message = j.at("message").get<std::string>();
    r.vertices = j.at("vertices").get<std::size_t>();
    r.edges = j.at("edges").get<std::size_t>();
    r.replans = j.at("replans").get<std::size_t>();
    r.policy_iterations = j.at("policy_iterations").get<std::size_t>();
    r.max_policy_iterations = j.at("max_policy_iterations").get<std::size_t>();
    r.path_cost = number_from(j.at("path_cost"));
    r.explore_time = j.at("explore_time").get<double>();
    r.exploit_time = j.at("exploit_time").get<double>();
    r.rebuild_time = j.at("rebuild_time").get<double>();
    r.total_time = j.at("total_time").get<double>();
    r.monotone = j.at("monotone").get<bool>();
    r.replan_times = j.at("replan_times").get<std::vector<double>>();
    r.replan_iterations = j.at("replan_iterations").get<std::vector<std::size_t>>();
    for (const auto& g : j.at("goal_costs")) r.goal_costs.push_back(number_from(g));
    out.push_back(std::move(r));
  }
  return out;
}

void emit(const std::vector<RunRecord>& records, Format format,
          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
  }
  out << (format == Format::kCsv ? to_csv(records) : to_json(records));
  out.flush();
  if (!out) throw std::ios_base::failure("failed writing '" + path.string() + "'");
}

std::vector<RunRecord> read_records(const std::filesystem::path& path, Format format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return format == Format::kCsv ? parse_csv(buf.str()) : parse_json(buf.str());
}

std::string summary_csv(const Summary& summary) {
  std::string out =
      "n_samples,batch_size,backend,trials,total_mean,total_std,exploit_mean,"
      "exploit_std,cost_mean,cost_std,batch_speedup,backend_speedup,"
      "reference_speedup\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const SummaryRow& r : summary.rows) {
    out += std::to_string(r.n_samples) + ',' + std::to_string(r.batch_size) + ',' +
           r.backend + ',' + std::to_string(r.trials) + ',' +
           format_double(r.total_mean) + ',' + format_double(r.total_std) + ',' +
           format_double(r.exploit_mean) + ',' + format_double(r.exploit_std) + ',' +
           format_double(r.cost_mean) + ',' + format_double(r.cost_std) + ',' +
           opt(r.batch_speedup) + ',' + opt(r.backend_speedup) + ',' +
           opt(r.reference_speedup) + '\n';
  }
  return out;
}

}  // namespace berrt

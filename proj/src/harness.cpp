#include "madbm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "madbm/errors.hpp"
#include "madbm/evaluation.hpp"

namespace madbm {

using nlohmann::json;

Method method_from_string(const std::string& name) {
  if (name == "CD") return Method::CD;
  if (name == "MA") return Method::MA;
  if (name == "RBM-CD") return Method::RbmCD;
  throw DomainError("unknown method '" + name + "' (expected CD, MA or RBM-CD)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::CD:
      return "CD";
    case Method::MA:
      return "MA";
    case Method::RbmCD:
      return "RBM-CD";
  }
  return "MA";
}

BinaryDataset DatasetSpec::load() const {
  BinaryDataset data;
  if (kind == "shifting_bar") {
    data = shifting_bar(n_v, bar_len > 0 ? bar_len : n_v / 2);
  } else if (kind == "idx") {
    if (threshold < 0 || threshold > 255) throw DomainError("threshold must lie in [0, 255]");
    data = binarize(load_idx(path), static_cast<std::uint8_t>(threshold));
  } else if (kind == "bits") {
    data = read_bitstrings(path);
  } else {
    throw DomainError("unknown dataset kind '" + kind + "'");
  }
  return limit > 0 ? data.head(limit) : data;
}

void ExperimentConfig::validate() const {
  if (ensemble_size < 1) throw DomainError("ensemble_size must be at least 1");
  if (methods.empty() || n_h_totals.empty() || alpha_topos.empty()) {
    throw DomainError("sweep lists must be nonempty");
  }
  if (threads < 1) throw DomainError("threads must be at least 1");
}

ExperimentConfig experiment_from_json(const json& doc) {
  ExperimentConfig c;
  if (doc.contains("dataset")) {
    const json& d = doc.at("dataset");
    c.dataset.kind = d.value("kind", c.dataset.kind);
    c.dataset.n_v = d.value("n_v", c.dataset.n_v);
    c.dataset.bar_len = d.value("bar_len", c.dataset.bar_len);
    c.dataset.path = d.value("path", c.dataset.path);
    c.dataset.threshold = d.value("threshold", c.dataset.threshold);
    c.dataset.limit = d.value("limit", c.dataset.limit);
  }
  if (doc.contains("methods")) {
    c.methods.clear();
    for (const auto& m : doc.at("methods")) c.methods.push_back(method_from_string(m.get<std::string>()));
  }
  c.n_h_totals = doc.value("n_h_totals", c.n_h_totals);
  c.alpha_topos = doc.value("alpha_topos", c.alpha_topos);
  c.total_updates = doc.value("total_updates", c.total_updates);
  c.lr_start = doc.value("lr_start", c.lr_start);
  c.lr_end = doc.value("lr_end", c.lr_end);
  c.batch_size = doc.value("batch_size", c.batch_size);
  c.cd_k = doc.value("cd_k", c.cd_k);
  c.p_max = doc.value("p_max", c.p_max);
  c.mode_solver = doc.value("mode_solver", c.mode_solver);
  c.ensemble_size = doc.value("ensemble_size", c.ensemble_size);
  c.seed_base = doc.value("seed_base", c.seed_base);
  c.out_dir = doc.value("out_dir", c.out_dir);
  c.threads = doc.value("threads", c.threads);
  c.eval_every = doc.value("eval_every", c.eval_every);
  c.ais_runs = doc.value("ais_runs", c.ais_runs);
  c.ais_intermediate = doc.value("ais_intermediate", c.ais_intermediate);
  c.eval_samples = doc.value("eval_samples", c.eval_samples);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  return {
      {"dataset",
       {{"kind", c.dataset.kind},
        {"n_v", c.dataset.n_v},
        {"bar_len", c.dataset.bar_len},
        {"path", c.dataset.path},
        {"threshold", c.dataset.threshold},
        {"limit", c.dataset.limit}}},
      {"methods", methods},
      {"n_h_totals", c.n_h_totals},
      {"alpha_topos", c.alpha_topos},
      {"total_updates", c.total_updates},
      {"lr_start", c.lr_start},
      {"lr_end", c.lr_end},
      {"batch_size", c.batch_size},
      {"cd_k", c.cd_k},
      {"p_max", c.p_max},
      {"mode_solver", c.mode_solver},
      {"ensemble_size", c.ensemble_size},
      {"seed_base", c.seed_base},
      {"out_dir", c.out_dir},
      {"threads", c.threads},
      {"eval_every", c.eval_every},
      {"ais_runs", c.ais_runs},
      {"ais_intermediate", c.ais_intermediate},
      {"eval_samples", c.eval_samples},
  };
}

LayerShape resolve_shape(std::size_t n_v, std::size_t n_h_total, double alpha_topo) {
  if (n_h_total < 2) throw DomainError("a two-hidden-layer split needs n_h_total >= 2");
  if (!(alpha_topo > 0.0)) throw DomainError("topology ratio must be positive");
  auto h1 = static_cast<std::size_t>(std::llround(static_cast<double>(n_h_total) / (1.0 + alpha_topo)));
  h1 = std::clamp<std::size_t>(h1, 1, n_h_total - 1);
  return LayerShape{n_v, h1, n_h_total - h1};
}

TrainConfig run_config(const ExperimentConfig& config, Method method, std::size_t n_v,
                       std::size_t n_h_total, double alpha_topo, std::uint64_t seed) {
  TrainConfig t;
  t.shape = method == Method::RbmCD ? LayerShape{n_v, n_h_total} : resolve_shape(n_v, n_h_total, alpha_topo);
  t.total_updates = config.total_updates;
  t.lr_start = config.lr_start;
  t.lr_end = config.lr_end;
  t.batch_size = config.batch_size;
  t.cd_k = config.cd_k;
  t.schedule = ScheduleParams::standard(config.total_updates, method == Method::MA ? config.p_max : 0.0);
  t.mode_solver.kind = solver_from_string(config.mode_solver);
  t.seed = seed;
  t.eval_every = config.eval_every;
  t.ais_runs = config.ais_runs;
  t.ais_intermediate = config.ais_intermediate;
  t.eval_samples = config.eval_samples;
  return t;
}

Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) throw DomainError("cannot aggregate an empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  auto nearest_rank = [&](std::size_t percent) {
    const std::size_t rank = std::max<std::size_t>(1, (percent * n + 99) / 100);
    return sorted[rank - 1];
  };
  Aggregate a;
  a.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  a.p5 = nearest_rank(5);
  a.p95 = nearest_rank(95);
  return a;
}

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool same_point(const RunRecord& r, const SummaryRow& s) {
  return r.method == s.method && r.n_v == s.n_v && r.n_h_total == s.n_h_total &&
         r.alpha_topo == s.alpha_topo;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const RunRecord> runs) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> values;
  for (const auto& r : runs) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) { return same_point(r, s); });
    if (it == rows.end()) {
      rows.push_back({r.method, r.n_v, r.n_h_total, r.alpha_topo, 0, {}});
      values.emplace_back();
      it = rows.end() - 1;
    }
    if (r.ll_kind == "failed") continue;
    values[static_cast<std::size_t>(it - rows.begin())].push_back(r.final_avg_ll);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].n_runs = values[i].size();
    if (!values[i].empty()) {
      rows[i].stats = aggregate(values[i]);
    } else {
      const double nan = std::nan("");
      rows[i].stats = {nan, nan, nan};
    }
  }
  return rows;
}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs) {
  out << "method,n_v,n_h_total,alpha_topo,seed,final_avg_ll,ll_kind,wall_seconds\n";
  for (const auto& r : runs) {
    out << to_string(r.method) << ',' << r.n_v << ',' << r.n_h_total << ',' << fmt_double(r.alpha_topo)
        << ',' << r.seed << ',' << fmt_double(r.final_avg_ll) << ',' << r.ll_kind << ','
        << fmt_double(r.wall_seconds) << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "method,n_v,n_h_total,alpha_topo,n_runs,median,p5,p95\n";
  for (const auto& s : rows) {
    out << to_string(s.method) << ',' << s.n_v << ',' << s.n_h_total << ',' << fmt_double(s.alpha_topo)
        << ',' << s.n_runs << ',' << fmt_double(s.stats.median) << ',' << fmt_double(s.stats.p5) << ','
        << fmt_double(s.stats.p95) << '\n';
  }
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("method,n_v,n_h_total,alpha_topo,seed,final_avg_ll,ll_kind", 0) != 0) {
    throw FormatError("unexpected runs.csv header", 0);
  }
  std::vector<RunRecord> runs;
  std::size_t offset = line.size() + 1;
  while (std::getline(in, line)) {
    const std::size_t start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < 8) throw FormatError("runs.csv row has " + std::to_string(cells.size()) + " cells", start);
    try {
      RunRecord r;
      r.method = method_from_string(cells[0]);
      r.n_v = std::stoull(cells[1]);
      r.n_h_total = std::stoull(cells[2]);
      r.alpha_topo = std::stod(cells[3]);
      r.seed = std::stoull(cells[4]);
      r.final_avg_ll = std::stod(cells[5]);
      r.ll_kind = cells[6];
      r.wall_seconds = std::stod(cells[7]);
      runs.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw FormatError("unparseable runs.csv row", start);
    }
  }
  return runs;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const BinaryDataset data = config.dataset.load();

  struct Job {
    Method method;
    std::size_t n_h_total;
    double alpha;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Method m : config.methods) {
    for (std::size_t n_h : config.n_h_totals) {
      for (double alpha : config.alpha_topos) {
        for (std::size_t e = 0; e < config.ensemble_size; ++e) jobs.push_back({m, n_h, alpha, config.seed_base + e});
      }
    }
  }

  ExperimentReport report;
  report.runs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      RunRecord& rec = report.runs[i];
      rec.method = job.method;
      rec.n_v = data.dim();
      rec.n_h_total = job.n_h_total;
      rec.alpha_topo = job.alpha;
      rec.seed = job.seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        const TrainConfig tc = run_config(config, job.method, data.dim(), job.n_h_total, job.alpha, job.seed);
        const TrainResult result = train(tc, data);
        const BinaryDataset eval_set = config.eval_samples > 0 ? data.head(config.eval_samples) : data;
        if (exact_evaluable(tc.shape)) {
          rec.final_avg_ll = exact_avg_ll(result.params, eval_set);
          rec.ll_kind = "exact";
        } else {
          Rng ais_rng = Rng::stream(job.seed, 0xa15);
          const auto est = ais_log_z(result.params, config.ais_intermediate, config.ais_runs, ais_rng);
          rec.final_avg_ll = ais_avg_ll(result.params, eval_set, est);
          rec.ll_kind = "ais";
        }
      } catch (const std::exception& e) {
        rec.final_avg_ll = std::nan("");
        rec.ll_kind = "failed";
        rec.error = e.what();
        std::lock_guard lock(log_mutex);
        std::cerr << "run " << to_string(job.method) << " n_h=" << job.n_h_total << " seed=" << job.seed
                  << " failed: " << e.what() << '\n';
      }
      rec.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  const std::size_t n_threads = std::min(config.threads, std::max<std::size_t>(1, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& r : report.runs) {
    if (r.ll_kind == "failed") report.all_succeeded = false;
  }
  report.summary = summarize(report.runs);

  std::filesystem::create_directories(config.out_dir);
  {
    std::ofstream out(std::filesystem::path(config.out_dir) / "runs.csv");
    write_runs_csv(out, report.runs);
  }
  {
    std::ofstream out(std::filesystem::path(config.out_dir) / "summary.csv");
    write_summary_csv(out, report.summary);
  }
  {
    std::ofstream out(std::filesystem::path(config.out_dir) / "config.json");
    out << to_json(config).dump(2) << '\n';
  }
  return report;
}

}  // namespace madbm

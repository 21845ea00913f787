#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "longadapt/adaptation.hpp"
#include "longadapt/analysis.hpp"
#include "longadapt/classifiers.hpp"
#include "longadapt/dataset.hpp"
#include "longadapt/preprocess.hpp"
#include "longadapt/protocol.hpp"
#include "longadapt/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace longadapt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitOverwrite = 3;

int thread_limit(int requested) {
  if (const char* env = std::getenv("LONGADAPT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) return std::min(requested, cap);
  }
  return requested;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct RunConfig {
  std::string manifest;
  std::string out_dir = "results";
  std::vector<Task> tasks = {Task::arousal, Task::valence};
  std::vector<Method> methods = {Method::individualized, Method::generic,
                                 Method::personalized_sda};
  std::vector<ModelKind> kinds = {ModelKind::gbdt};
  WindowConfig window;
  AdaptationConfig adaptation;
  ModelSpec model;
  uint64_t seed = 0;
  int threads = 1;
  bool write_roc = true;
};

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("config json: ") + e.what());
  }
  RunConfig c;
  try {
    c.manifest = j.at("manifest").get<std::string>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("tasks")) {
      c.tasks.clear();
      for (const auto& t : j.at("tasks"))
        c.tasks.push_back(task_from_name(t.get<std::string>()));
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods"))
        c.methods.push_back(method_from_name(m.get<std::string>()));
    }
    if (j.contains("kinds")) {
      c.kinds.clear();
      for (const auto& k : j.at("kinds"))
        c.kinds.push_back(model_kind_from_name(k.get<std::string>()));
    }
    if (j.contains("window")) {
      const auto& w = j.at("window");
      if (w.contains("window_seconds")) c.window.window_seconds = w.at("window_seconds");
      if (w.contains("shift_seconds")) c.window.shift_seconds = w.at("shift_seconds");
      if (w.contains("min_label_fraction"))
        c.window.min_label_fraction = w.at("min_label_fraction");
    }
    if (j.contains("adaptation")) {
      const auto& a = j.at("adaptation");
      if (a.contains("alpha_grid"))
        c.adaptation.alpha_grid = a.at("alpha_grid").get<std::vector<double>>();
      if (a.contains("cv_folds")) c.adaptation.cv_folds = a.at("cv_folds");
      if (a.contains("fold_strategy"))
        c.adaptation.fold_strategy =
            a.at("fold_strategy").get<std::string>() == "stratified_random"
                ? FoldStrategy::stratified_random
                : FoldStrategy::contiguous;
      if (a.contains("selection_metric"))
        c.adaptation.selection_metric =
            a.at("selection_metric").get<std::string>() == "error"
                ? SelectionMetric::error
                : SelectionMetric::auroc;
    }
    if (j.contains("gbdt")) {
      const auto& g = j.at("gbdt");
      if (g.contains("rounds")) c.model.gbdt.rounds = g.at("rounds");
      if (g.contains("max_depth")) c.model.gbdt.max_depth = g.at("max_depth");
      if (g.contains("learning_rate")) c.model.gbdt.learning_rate = g.at("learning_rate");
      if (g.contains("l2")) c.model.gbdt.l2 = g.at("l2");
      if (g.contains("min_child_weight"))
        c.model.gbdt.min_child_weight = g.at("min_child_weight");
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("write_roc")) c.write_roc = j.at("write_roc").get<bool>();
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("config shape: ") + e.what());
  }
  if (c.tasks.empty() || c.methods.empty() || c.kinds.empty())
    throw Error(Errc::config_error, "need at least one task, method and kind");
  c.adaptation.validate();
  c.model.validate();
  return c;
}

// ---- results.csv round-trip for stats/report ----

struct ResultRow {
  std::string participant;
  int test_session = 0;
  std::string method;
  std::string kind;
  std::string task;
  double auroc = 0.0;
  double f1_pos = 0.0;
  double f1_neg = 0.0;
  std::size_t n = 0;
  std::optional<double> alpha;
};

std::vector<ResultRow> load_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open results " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(Errc::parse_error, "empty results file");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 11) cells.emplace_back();
    ResultRow r;
    r.participant = cells[1];
    r.test_session = std::stoi(cells[2]);
    r.method = cells[3];
    r.kind = cells[4];
    r.task = cells[5];
    r.auroc = std::stod(cells[6]);
    r.f1_pos = std::stod(cells[7]);
    r.f1_neg = std::stod(cells[8]);
    r.n = static_cast<std::size_t>(std::stoul(cells[9]));
    if (!cells[10].empty()) r.alpha = std::stod(cells[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// instance-weighted average AUROC over a set of result rows
double weighted_auroc(const std::vector<const ResultRow*>& rows) {
  double num = 0.0, den = 0.0;
  for (const auto* r : rows) {
    num += static_cast<double>(r->n) * r->auroc;
    den += static_cast<double>(r->n);
  }
  return den > 0.0 ? num / den : 0.0;
}

// ---- subcommands ----

int cmd_synth(const std::string& config_path, std::optional<uint64_t> seed,
              const std::string& out_dir, bool force) {
  SynthConfig cfg = config_path.empty() ? SynthConfig{}
                                        : SynthConfig::from_json_file(config_path);
  if (seed) cfg.seed = *seed;
  cfg.validate();
  if (!force && fs::exists(fs::path(out_dir) / "manifest.json")) {
    std::cerr << "refusing to overwrite " << out_dir
              << "/manifest.json (use --force)\n";
    return kExitOverwrite;
  }
  const SynthStudy study = generate_study(cfg);
  const std::string manifest = write_study(study, out_dir);
  std::cout << manifest << "\n";
  return kExitOk;
}

int cmd_preprocess(const std::string& manifest_path, const std::string& out_dir,
                   const WindowConfig& wcfg) {
  StudyManifest manifest = load_manifest(manifest_path);
  fs::create_directories(out_dir);
  std::vector<WindowInstance> all;
  for (const auto& p : manifest.participants) {
    int idx = 0;
    for (const auto& rel : p.session_paths) {
      SessionData s = load_session(resolve_session_path(manifest_path, rel),
                                   manifest.schema);
      s.participant_id = p.id;
      s.session_index = ++idx;
      auto windows = window_features(s, wcfg, manifest.schema,
                                     manifest.frame_rate_hz);
      if (windows.empty())
        std::cerr << "warning: no windows for " << p.id << " session " << idx
                  << "\n";
      all.insert(all.end(), windows.begin(), windows.end());
    }
  }
  const std::string out = (fs::path(out_dir) / "windows.csv").string();
  write_windows_csv(all, manifest.schema, out);
  std::cout << out << " (" << all.size() << " windows)\n";
  return kExitOk;
}

int cmd_evaluate(const std::string& config_path) {
  RunConfig cfg = load_run_config(config_path);
  StudyWindows study = load_study_windows(cfg.manifest, cfg.window);

  const int threads = thread_limit(std::max(1, cfg.threads));
  StudyResult result = run_study(study, cfg.methods, cfg.kinds, cfg.tasks,
                                 cfg.model, cfg.adaptation, cfg.seed, threads);
  if (result.cells.empty()) {
    std::cerr << "no cell succeeded\n";
    for (const auto& s : result.skipped)
      std::cerr << "  " << s.key.to_string() << ": " << s.reason << "\n";
    return kExitInput;
  }

  fs::create_directories(cfg.out_dir);
  write_results_csv(result, (fs::path(cfg.out_dir) / "results.csv").string());
  {
    std::ofstream out(fs::path(cfg.out_dir) / "results.json");
    out << results_to_json(result) << "\n";
  }
  if (cfg.write_roc)
    write_roc_files(result, (fs::path(cfg.out_dir) / "roc").string());

  // wAVE table per (kind, task): rows = participants + wAVE, cols = methods
  for (Task task : cfg.tasks)
    for (ModelKind kind : cfg.kinds) {
      std::cout << "\n== " << task_name(task) << " / " << model_kind_name(kind)
                << " (weighted AUROC) ==\n";
      std::cout << "participant";
      for (Method m : cfg.methods) std::cout << "\t" << method_name(m);
      std::cout << "\n";
      std::vector<double> total_num(cfg.methods.size(), 0.0);
      std::vector<double> total_den(cfg.methods.size(), 0.0);
      for (const auto& pid : study.participant_order) {
        std::cout << pid;
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
          double num = 0.0, den = 0.0;
          for (const auto& [key, r] : result.cells)
            if (key.task == task && key.kind == kind &&
                key.method == cfg.methods[mi] && key.participant == pid) {
              num += static_cast<double>(r.n_test_instances) * r.auroc_value;
              den += static_cast<double>(r.n_test_instances);
            }
          total_num[mi] += num;
          total_den[mi] += den;
          std::cout << "\t" << (den > 0 ? fmt(num / den) : "-");
        }
        std::cout << "\n";
      }
      std::cout << "wAVE";
      for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
        std::cout << "\t"
                  << (total_den[mi] > 0 ? fmt(total_num[mi] / total_den[mi])
                                        : "-");
      std::cout << "\n";
    }
  for (const auto& s : result.skipped)
    std::cerr << "skipped " << s.key.to_string() << ": " << s.reason << "\n";
  return kExitOk;
}

int cmd_stats(const std::string& results_path,
              const std::vector<std::string>& comparisons) {
  const auto rows = load_results_csv(results_path);
  json out = json::array();
  for (const auto& cmp : comparisons) {
    const auto colon = cmp.find(':');
    if (colon == std::string::npos)
      throw Error(Errc::config_error, "comparison must look like PER:GEN");
    const std::string name_a = cmp.substr(0, colon);
    const std::string name_b = cmp.substr(colon + 1);
    const std::string a = method_name(method_from_name(name_a));
    const std::string b = method_name(method_from_name(name_b));

    // pair cells by (participant, session, kind, task)
    using Key = std::tuple<std::string, int, std::string, std::string>;
    std::map<Key, const ResultRow*> side_a, side_b;
    for (const auto& r : rows) {
      Key key{r.participant, r.test_session, r.kind, r.task};
      if (r.method == a) side_a[key] = &r;
      if (r.method == b) side_b[key] = &r;
    }
    if (side_a.empty() || side_b.empty())
      throw Error(Errc::empty_results, "no cells for comparison " + cmp);
    for (const auto& [key, row] : side_a)
      if (!side_b.count(key))
        throw Error(Errc::parse_error,
                    "unpaired cell for " + cmp + ": " + std::get<0>(key) +
                        " session " + std::to_string(std::get<1>(key)));
    for (const auto& [key, row] : side_b)
      if (!side_a.count(key))
        throw Error(Errc::parse_error,
                    "unpaired cell for " + cmp + ": " + std::get<0>(key) +
                        " session " + std::to_string(std::get<1>(key)));

    json metrics;
    const char* metric_names[3] = {"auroc", "f1_pos", "f1_neg"};
    for (int m = 0; m < 3; ++m) {
      PairedSample sample;
      sample.name_a = a;
      sample.name_b = b;
      for (const auto& [key, ra] : side_a) {
        const ResultRow* rb = side_b.at(key);
        const double va = m == 0 ? ra->auroc : m == 1 ? ra->f1_pos : ra->f1_neg;
        const double vb = m == 0 ? rb->auroc : m == 1 ? rb->f1_pos : rb->f1_neg;
        sample.values_a.push_back(va);
        sample.values_b.push_back(vb);
      }
      try {
        const WilcoxonOutcome o = wilcoxon_one_sided(sample);
        metrics[metric_names[m]] = {{"n_pairs", o.n_pairs},
                                    {"n_effective", o.n_effective},
                                    {"w_plus", o.w_plus},
                                    {"z", o.z},
                                    {"p_one_sided", o.p_one_sided},
                                    {"effect_size_r", o.effect_size_r},
                                    {"mode", o.mode}};
      } catch (const Error& e) {
        if (e.code() != Errc::all_zero_differences) throw;
        metrics[metric_names[m]] = {{"error", "AllZeroDifferences"}};
      }
    }
    out.push_back(
        {{"comparison", a + ">" + b}, {"metrics", std::move(metrics)}});
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int cmd_report(const std::string& results_dir) {
  const fs::path dir(results_dir);
  const std::string results_path = (dir / "results.csv").string();
  if (!fs::exists(results_path))
    throw Error(Errc::parse_error, "no results.csv in " + results_dir);
  const auto rows = load_results_csv(results_path);

  std::set<std::string> methods, kinds, tasks, participants;
  std::set<std::pair<std::string, int>> cells;
  for (const auto& r : rows) {
    methods.insert(r.method);
    kinds.insert(r.kind);
    tasks.insert(r.task);
    participants.insert(r.participant);
    cells.insert({r.participant, r.test_session});
  }

  std::ofstream md(dir / "report.md");
  md << "# Evaluation report\n";

  // Table-1 style: participants x methods, weighted AUROC
  for (const auto& task : tasks)
    for (const auto& kind : kinds) {
      md << "\n## Weighted AUROC, " << task << " / " << kind << "\n\n";
      md << "| participant |";
      for (const auto& m : methods) md << " " << m << " |";
      md << "\n|---|";
      for (std::size_t i = 0; i < methods.size(); ++i) md << "---|";
      md << "\n";
      auto emit_row = [&](const std::string& label, const std::string& pid) {
        md << "| " << label << " |";
        for (const auto& m : methods) {
          std::vector<const ResultRow*> sel;
          for (const auto& r : rows)
            if (r.task == task && r.kind == kind && r.method == m &&
                (pid.empty() || r.participant == pid))
              sel.push_back(&r);
          md << " " << (sel.empty() ? std::string("-") : fmt(weighted_auroc(sel)))
             << " |";
        }
        md << "\n";
      };
      for (const auto& pid : participants) emit_row(pid, pid);
      emit_row("wAVE", "");
    }

  // Table-2 style: per-session AUROC matrix
  for (const auto& task : tasks)
    for (const auto& kind : kinds) {
      md << "\n## Session-by-session AUROC, " << task << " / " << kind
         << "\n\n";
      md << "| participant | session |";
      for (const auto& m : methods) md << " " << m << " |";
      md << "\n|---|---|";
      for (std::size_t i = 0; i < methods.size(); ++i) md << "---|";
      md << "\n";
      for (const auto& [pid, session] : cells) {
        md << "| " << pid << " | " << session << " |";
        for (const auto& m : methods) {
          std::string v = "-";
          for (const auto& r : rows)
            if (r.task == task && r.kind == kind && r.method == m &&
                r.participant == pid && r.test_session == session)
              v = fmt(r.auroc);
          md << " " << v << " |";
        }
        md << "\n";
      }
    }

  // merged ROC curves per (task, kind, method), averaged over cells on a
  // common fpr grid
  bool any_roc = false;
  if (fs::exists(dir / "roc")) {
    for (const auto& task : tasks)
      for (const auto& kind : kinds)
        for (const auto& m : methods) {
          std::vector<double> grid;
          for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
          std::vector<double> tpr_sum(grid.size(), 0.0);
          int n_curves = 0;
          for (const auto& entry : fs::directory_iterator(dir / "roc")) {
            const std::string name = entry.path().filename().string();
            const std::string prefix = task + "-" + kind + "-" + m + "-";
            if (name.rfind(prefix, 0) != 0) continue;
            std::ifstream rf(entry.path());
            std::string line;
            std::getline(rf, line);  // header
            std::vector<RocPoint> pts;
            while (std::getline(rf, line)) {
              const auto comma = line.find(',');
              if (comma == std::string::npos) continue;
              pts.push_back({std::stod(line.substr(0, comma)),
                             std::stod(line.substr(comma + 1))});
            }
            if (pts.empty()) continue;
            ++n_curves;
            // step-interpolated tpr at each grid fpr
            std::size_t j = 0;
            for (std::size_t g = 0; g < grid.size(); ++g) {
              while (j + 1 < pts.size() && pts[j + 1].fpr <= grid[g]) ++j;
              tpr_sum[g] += pts[j].tpr;
            }
          }
          if (n_curves == 0) continue;
          any_roc = true;
          std::ofstream out(dir / ("roc_mean_" + task + "_" + kind + "_" + m +
                                   ".csv"));
          out << "fpr,tpr\n";
          for (std::size_t g = 0; g < grid.size(); ++g) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", grid[g],
                          tpr_sum[g] / n_curves);
            out << buf;
          }
        }
  }
  if (!any_roc) std::cerr << "warning: no ROC point files found; report has no curves\n";

  std::cout << (dir / "report.md").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longitudinal affect personalization toolkit"};
  app.require_subcommand(1);

  std::string synth_config, synth_out = "study";
  std::optional<uint64_t> synth_seed;
  bool synth_force = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic study");
  synth->add_option("--config", synth_config, "SynthConfig JSON path");
  synth->add_option("--seed", synth_seed, "Override the config seed");
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_flag("--force", synth_force, "Allow overwriting an existing study");

  std::string pre_manifest, pre_out;
  WindowConfig pre_window;
  auto* pre = app.add_subcommand("preprocess", "Window a study into instances");
  pre->add_option("--manifest", pre_manifest, "manifest.json path")->required();
  pre->add_option("--out", pre_out, "Output directory")->required();
  pre->add_option("--window-seconds", pre_window.window_seconds);
  pre->add_option("--shift-seconds", pre_window.shift_seconds);
  pre->add_option("--min-label-fraction", pre_window.min_label_fraction);

  std::string eval_config;
  auto* eval = app.add_subcommand("evaluate", "Run the evaluation protocol");
  eval->add_option("--config", eval_config, "RunConfig JSON path")->required();

  std::string stats_results;
  std::vector<std::string> stats_compare;
  auto* stats = app.add_subcommand("stats", "Paired significance tests");
  stats->add_option("--results", stats_results, "results.csv path")->required();
  stats->add_option("--compare", stats_compare, "Pairs like PER:GEN")
      ->required();

  std::string report_results;
  auto* report = app.add_subcommand("report", "Summarize a results directory");
  report->add_option("--results", report_results, "results directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(synth_config, synth_seed, synth_out, synth_force);
    if (pre->parsed()) return cmd_preprocess(pre_manifest, pre_out, pre_window);
    if (eval->parsed()) return cmd_evaluate(eval_config);
    if (stats->parsed()) return cmd_stats(stats_results, stats_compare);
    if (report->parsed()) return cmd_report(report_results);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

#include "wellclust/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "wellclust/analysis.hpp"
#include "wellclust/cluster.hpp"
#include "wellclust/errors.hpp"
#include "wellclust/graph_io.hpp"
#include "wellclust/rng.hpp"

namespace wellclust {
namespace {

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string csv_number(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  std::ostringstream s;
  s << std::setprecision(17) << v.get<double>();
  return s.str();
}

std::string partition_text(const Partition& p) {
  std::ostringstream s;
  write_partition(s, p);
  return s.str();
}

std::string cluster_csv(const nlohmann::json& quality) {
  std::ostringstream s;
  s << "cluster,size,volume,conductance\n";
  const int k = quality["k"].get<int>();
  for (int i = 0; i < k; ++i) {
    s << i << ',' << quality["cluster_sizes"][i].get<std::size_t>() << ','
      << csv_number(quality["cluster_volumes"][i]) << ','
      << (quality.contains("conductance") ? csv_number(quality["conductance"][i]) : "") << '\n';
  }
  return s.str();
}

std::string certify_csv(const nlohmann::json& checks) {
  std::ostringstream s;
  s << "check,status,value,bound,hypothesis\n";
  for (const auto& c : checks) {
    s << c["check"].get<std::string>() << ',' << c["status"].get<std::string>() << ','
      << csv_number(c["value"]) << ',' << csv_number(c["bound"]) << ','
      << c["hypothesis"].get<std::string>() << '\n';
  }
  return s.str();
}

nlohmann::json diagnostics_json(const std::vector<TemperatureDiagnostics>& per_t) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : per_t) {
    out.push_back({{"t", d.t},
                   {"status", d.status},
                   {"attempts", d.attempts},
                   {"survivors", d.survivors},
                   {"score", json_number(d.score)},
                   {"raw_cost", json_number(d.raw_cost)},
                   {"sketch_dim", d.sketch_dim},
                   {"krylov_steps", d.krylov_steps}});
  }
  return out;
}

Graph load_input(const RunConfig& cfg, std::optional<Partition>* planted) {
  if (cfg.gen) {
    Instance inst = generate(*cfg.gen);
    if (planted) *planted = inst.planted;
    return std::move(inst.graph);
  }
  if (cfg.input.empty()) throw DomainError("no input graph (use --input or --family)");
  return read_graph(cfg.input);
}

void write_report(const RunConfig& cfg, const std::string& stem, const std::string& json_text,
                  const std::string& csv_text) {
  std::filesystem::create_directories(cfg.out_dir);
  write_file_atomic(cfg.out_dir / (stem + (cfg.format == "csv" ? ".csv" : ".json")),
                    cfg.format == "csv" ? csv_text : json_text);
}

template <typename Body>
int guarded(std::ostream& log, Body body) {
  try {
    return body();
  } catch (const DegenerateStructure& e) {
    log << "degenerate structure: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const PipelineError& e) {
    log << "pipeline failed: " << e.what() << '\n';
    for (const auto& f : e.failures()) log << "  " << f << '\n';
    return kExitPipeline;
  } catch (const ConvergenceError& e) {
    log << "no convergence: " << e.what() << '\n';
    return kExitPipeline;
  } catch (const SeedingFailure& e) {
    log << "seeding failed: " << e.what() << '\n';
    return kExitPipeline;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j{{"command", cfg.command},
                   {"k", cfg.k},
                   {"seed", cfg.seed},
                   {"tol", cfg.tol},
                   {"epsilon", cfg.epsilon},
                   {"delta", cfg.delta ? nlohmann::json(*cfg.delta) : nlohmann::json(nullptr)},
                   {"t_max", cfg.t_max},
                   {"pipeline", cfg.pipeline},
                   {"out_dir", cfg.out_dir.string()},
                   {"format", cfg.format}};
  if (cfg.gen) j["gen"] = to_json(*cfg.gen);
  if (!cfg.input.empty()) j["input"] = cfg.input.string();
  if (!cfg.reference.empty()) j["reference"] = cfg.reference.string();
  if (cfg.core_alpha) j["core_alpha"] = *cfg.core_alpha;
  if (!cfg.bench_sizes.empty()) j["bench_sizes"] = cfg.bench_sizes;
  return j;
}

int cmd_generate(const GenSpec& spec, const std::filesystem::path& out_dir, const std::string& name,
                 std::ostream& log) {
  return guarded(log, [&] {
    const Instance inst = generate(spec);
    std::filesystem::create_directories(out_dir);
    std::ostringstream edges;
    write_edge_list(edges, inst.graph);
    write_file_atomic(out_dir / (name + ".edges"), edges.str());
    write_file_atomic(out_dir / (name + ".partition"), partition_text(inst.planted));
    nlohmann::json manifest{{"spec", to_json(spec)},
                            {"metadata", inst.metadata},
                            {"n", inst.graph.num_vertices()},
                            {"m", inst.graph.num_edges()},
                            {"graph", name + ".edges"},
                            {"partition", name + ".partition"}};
    write_file_atomic(out_dir / (name + ".manifest.json"), dump(manifest));
    log << "wrote " << inst.graph.num_vertices() << " vertices, " << inst.graph.num_edges()
        << " edges to " << out_dir.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_cluster(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    std::optional<Partition> planted;
    const Graph g = load_input(cfg, &planted);
    if (cfg.k < 1) throw DomainError("--k is required");
    std::optional<Partition> ref = planted;
    if (!cfg.reference.empty()) ref = read_partition(cfg.reference, g, cfg.k);

    nlohmann::json report;
    report["run_config"] = to_json(cfg);
    report["seeds"] = {{"top", cfg.seed},
                       {"eigensolver", substream_seed(cfg.seed, "eigensolver")},
                       {"kmeans", substream_seed(cfg.seed, "kmeans")}};
    Partition found;
    if (cfg.pipeline == "spectral") {
      SpectralPipelineOptions opts;
      opts.eig.tol = cfg.tol;
      const auto res = spectral_cluster_pipeline(g, cfg.k, cfg.seed, opts);
      found = res.partition;
      report["cost"] = res.kmeans.cost;
      report["kmeans_iterations"] = res.kmeans.iterations;
      report["cost_history"] = res.kmeans.cost_history;
      report["eigenpairs"] = to_json(res.eig);
    } else if (cfg.pipeline == "fast") {
      FastPipelineOptions opts;
      opts.epsilon = cfg.epsilon;
      opts.delta = cfg.delta;
      opts.t_max = cfg.t_max;
      const auto res = fast_cluster_pipeline(g, cfg.k, cfg.seed, opts);
      found = res.partition;
      report["best_t"] = res.best_t;
      report["score"] = json_number(res.score);
      report["cost"] = json_number(res.raw_cost);
      report["per_t"] = diagnostics_json(res.per_t);
    } else {
      throw DomainError("unknown pipeline '" + cfg.pipeline + "'");
    }
    const nlohmann::json quality = quality_report(g, found, ref ? &*ref : nullptr);
    report["quality"] = quality;
    std::filesystem::create_directories(cfg.out_dir);
    write_file_atomic(cfg.out_dir / "partition.txt", partition_text(found));
    write_report(cfg, "report", dump(report), cluster_csv(quality));
    log << "max conductance " << csv_number(quality.value("max_conductance", nlohmann::json()))
        << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_certify(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    std::optional<Partition> planted;
    const Graph g = load_input(cfg, &planted);
    std::optional<Partition> ref = planted;
    if (!cfg.reference.empty()) ref = read_partition(cfg.reference, g, cfg.k);
    if (!ref) throw DomainError("certify needs a reference partition (--ref)");
    CertifyOptions opts;
    opts.eig.tol = cfg.tol;
    opts.eig.seed = substream_seed(cfg.seed, "eigensolver");
    opts.core_alpha = cfg.core_alpha;
    Certification c = certify(g, *ref, opts);
    c.report["run_config"] = to_json(cfg);
    write_report(cfg, "certify", dump(c.report), certify_csv(c.report["checks"]));
    int failed = 0;
    int na = 0;
    for (const auto& check : c.report["checks"]) {
      failed += check["status"] == "fail";
      na += check["status"] == "not-applicable";
    }
    log << c.report["checks"].size() << " checks, " << failed << " failed, " << na
        << " not applicable\n";
    return static_cast<int>(c.all_passed ? kExitOk : kExitCheckFailed);
  });
}

int cmd_bench(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const std::vector<int> sizes = cfg.bench_sizes.empty() ? std::vector<int>{1000, 10000} : cfg.bench_sizes;
    const int k = cfg.k > 0 ? cfg.k : 4;
    nlohmann::json rows = nlohmann::json::array();
    std::vector<double> log_m, log_time;
    for (int n : sizes) {
      const int s = n / k;
      // Sparse planted partition: expected intra degree 12, inter degree 1.
      const double p = std::min(1.0, 12.0 / (s - 1));
      const double q = 1.0 / (static_cast<double>(k - 1) * s);
      const Instance inst = planted_partition(k, s, p, q, substream_seed(cfg.seed, "bench", n));
      FastPipelineOptions opts;
      opts.epsilon = cfg.epsilon;
      opts.delta = cfg.delta;
      opts.t_max = cfg.t_max;
      const auto start = std::chrono::steady_clock::now();
      const auto res = fast_cluster_pipeline(inst.graph, k, cfg.seed, opts);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const auto match = match_partitions(inst.graph, res.partition, inst.planted);
      const double m = static_cast<double>(inst.graph.num_edges());
      rows.push_back({{"n", inst.graph.num_vertices()},
                      {"m", inst.graph.num_edges()},
                      {"temperatures", res.per_t.size()},
                      {"seconds", secs},
                      {"seconds_per_edge", secs / m},
                      {"max_fraction", match.max_fraction}});
      log_m.push_back(std::log(m));
      log_time.push_back(std::log(secs));
      log << "n = " << n << ", m = " << inst.graph.num_edges() << ": " << secs << " s\n";
    }
    nlohmann::json report{{"run_config", to_json(cfg)}, {"family", "planted_partition"}, {"k", k}, {"rows", rows}};
    if (log_m.size() >= 2) {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < log_m.size(); ++i) {
        mx += log_m[i];
        my += log_time[i];
      }
      mx /= static_cast<double>(log_m.size());
      my /= static_cast<double>(log_m.size());
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < log_m.size(); ++i) {
        sxy += (log_m[i] - mx) * (log_time[i] - my);
        sxx += (log_m[i] - mx) * (log_m[i] - mx);
      }
      report["loglog_slope"] = sxy / sxx;
      double lo = rows[0]["seconds_per_edge"].get<double>(), hi = lo;
      for (const auto& r : rows) {
        lo = std::min(lo, r["seconds_per_edge"].get<double>());
        hi = std::max(hi, r["seconds_per_edge"].get<double>());
      }
      report["per_edge_spread"] = hi / lo;
    }
    std::ostringstream csv;
    csv << "n,m,seconds,seconds_per_edge,max_fraction\n";
    for (const auto& r : rows) {
      csv << r["n"] << ',' << r["m"] << ',' << csv_number(r["seconds"]) << ','
          << csv_number(r["seconds_per_edge"]) << ',' << csv_number(r["max_fraction"]) << '\n';
    }
    write_report(cfg, "bench", dump(report), csv.str());
    return static_cast<int>(kExitOk);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral clustering of well-clustered graphs"};
  app.require_subcommand(1);
  RunConfig cfg;
  GenSpec spec;
  std::string name = "graph";
  std::string spec_file;
  bool use_family = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.k, "Number of clusters");
    sub->add_option("--seed", cfg.seed, "Top-level random seed");
    sub->add_option("--out-dir", cfg.out_dir, "Output directory");
    sub->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_graph_source = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Graph file (edge list, or METIS with .graph/.metis)");
    sub->add_option("--family", spec.family, "Generate the input instead of reading it")
        ->each([&](const std::string&) { use_family = true; });
    sub->add_option("--s", spec.s, "Cluster size for generated input");
    sub->add_option("--p", spec.p, "Intra-cluster edge probability");
    sub->add_option("--q", spec.q, "Inter-cluster edge probability");
    sub->add_option("--extra-edges", spec.extra_edges, "Noise edges for noisy_cliques");
  };

  CLI::App* gen = app.add_subcommand("generate", "Write a generated instance");
  add_common(gen);
  gen->add_option("--family", spec.family, "disjoint_cliques | ring_of_cliques | planted_partition | noisy_cliques");
  gen->add_option("--s", spec.s, "Cluster size");
  gen->add_option("--sizes", spec.sizes, "Clique sizes (disjoint_cliques)");
  gen->add_option("--p", spec.p, "Intra-cluster edge probability");
  gen->add_option("--q", spec.q, "Inter-cluster edge probability");
  gen->add_option("--extra-edges", spec.extra_edges, "Noise edges (noisy_cliques)");
  gen->add_option("--spec", spec_file, "JSON manifest holding the generator spec");
  gen->add_option("--name", name, "Output file stem");

  CLI::App* cluster = app.add_subcommand("cluster", "Cluster a graph");
  add_common(cluster);
  add_graph_source(cluster);
  cluster->add_option("--pipeline", cfg.pipeline, "spectral | fast")->check(CLI::IsMember({"spectral", "fast"}));
  cluster->add_option("--tol", cfg.tol, "Eigensolver tolerance");
  cluster->add_option("--epsilon", cfg.epsilon, "Sketch distortion parameter");
  cluster->add_option("--delta", cfg.delta, "Matrix exponential error budget");
  cluster->add_option("--t-max", cfg.t_max, "Largest temperature (default n^3)");
  cluster->add_option("--ref", cfg.reference, "Reference partition for matching");

  CLI::App* cert = app.add_subcommand("certify", "Check structural inequalities against a reference partition");
  add_common(cert);
  add_graph_source(cert);
  cert->add_option("--ref", cfg.reference, "Reference partition");
  cert->add_option("--tol", cfg.tol, "Eigensolver tolerance");
  cert->add_option("--alpha", cfg.core_alpha, "Core radius multiplier");

  CLI::App* bench = app.add_subcommand("bench", "Time the fast pipeline across graph sizes");
  add_common(bench);
  bench->add_option("--sizes", cfg.bench_sizes, "Vertex counts");
  bench->add_option("--epsilon", cfg.epsilon, "Sketch distortion parameter");
  bench->add_option("--delta", cfg.delta, "Matrix exponential error budget");
  bench->add_option("--t-max", cfg.t_max, "Largest temperature (default n^3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitUsage);
  }

  if (gen->parsed()) {
    if (!spec_file.empty()) {
      try {
        std::ifstream in(spec_file);
        if (!in) throw std::runtime_error("cannot open " + spec_file);
        nlohmann::json j = nlohmann::json::parse(in);
        spec = gen_spec_from_json(j.contains("spec") ? j["spec"] : j);
      } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
      }
    } else {
      spec.k = cfg.k > 0 ? cfg.k : spec.k;
      spec.seed = cfg.seed;
    }
    return cmd_generate(spec, cfg.out_dir, name, err);
  }
  if (use_family) {
    spec.k = cfg.k;
    spec.seed = cfg.seed;
    cfg.gen = spec;
  }
  if (cluster->parsed()) {
    cfg.command = "cluster";
    return cmd_cluster(cfg, err);
  }
  if (cert->parsed()) {
    cfg.command = "certify";
    return cmd_certify(cfg, err);
  }
  cfg.command = "bench";
  return cmd_bench(cfg, err);
}

}  // namespace wellclust

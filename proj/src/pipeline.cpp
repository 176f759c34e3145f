#include "qcdiff/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qcdiff/diffusion.hpp"
#include "qcdiff/image.hpp"
#include "qcdiff/parallel.hpp"
#include "qcdiff/ucc.hpp"

namespace qcdiff {

void PipelineConfig::validate() const {
  if (n_qubits < 2) throw InvalidRange("pipeline needs n_qubits >= 2");
  if (corpus_count < 1 || sample_count < 1 || train_steps < 1 ||
      batch_size < 1 || timesteps < 2 || vqe_max_iters < 1 || restarts < 1)
    throw InvalidRange("pipeline counts must be positive");
  if (out_dir.empty()) throw InvalidRange("pipeline needs an output directory");
}

namespace {

std::filesystem::path under(const PipelineConfig& c, const char* name) {
  return c.out_dir / name;
}

}  // namespace

std::filesystem::path artifact_dataset(const PipelineConfig& c) {
  return under(c, "dataset.qcim");
}
std::filesystem::path artifact_checkpoint(const PipelineConfig& c) {
  return under(c, "checkpoint.qdnm");
}
std::filesystem::path artifact_loss(const PipelineConfig& c) {
  return under(c, "loss.csv");
}
std::filesystem::path artifact_samples(const PipelineConfig& c) {
  return under(c, "samples.qcim");
}
std::filesystem::path artifact_circuits(const PipelineConfig& c) {
  return under(c, "circuits.json");
}
std::filesystem::path artifact_decode_meta(const PipelineConfig& c) {
  return under(c, "decode.json");
}
std::filesystem::path artifact_baselines(const PipelineConfig& c) {
  return under(c, "baselines.json");
}
std::filesystem::path artifact_candidate_results(const PipelineConfig& c) {
  return under(c, "vqe_candidates.csv");
}
std::filesystem::path artifact_baseline_results(const PipelineConfig& c) {
  return under(c, "vqe_baselines.csv");
}
std::filesystem::path artifact_report(const PipelineConfig& c) {
  return under(c, "report.csv");
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_rows_csv(const std::vector<ReportRow>& rows,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "id,source,gate_count,param_count,best_energy,iterations\n";
  for (const ReportRow& r : rows)
    out << r.id << ',' << r.source << ',' << r.gate_count << ','
        << r.param_count << ',' << fmt17(r.best_energy) << ',' << r.iterations
        << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ReportRow> parse_rows_text(std::istream& in,
                                       const std::string& origin) {
  std::vector<ReportRow> rows;
  std::string line;
  bool saw_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;  // fixed header row
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    ReportRow r;
    try {
      std::getline(ls, field, ',');
      r.id = std::stoi(field);
      std::getline(ls, r.source, ',');
      std::getline(ls, field, ',');
      r.gate_count = std::stoi(field);
      std::getline(ls, field, ',');
      r.param_count = std::stoi(field);
      std::getline(ls, field, ',');
      r.best_energy = std::stod(field);
      std::getline(ls, field, ',');
      r.iterations = std::stoi(field);
    } catch (const std::exception&) {
      throw ParseError(origin + ": bad report row at line " +
                       std::to_string(lineno));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

ComparisonReport compare_populations(const std::vector<ReportRow>& candidates,
                                     const std::vector<ReportRow>& baselines,
                                     std::optional<double> exact) {
  if (candidates.empty() || baselines.empty())
    throw EmptyPopulation("both candidate and baseline populations required");
  ComparisonReport rep;
  rep.rows = candidates;
  rep.rows.insert(rep.rows.end(), baselines.begin(), baselines.end());
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     return std::tie(a.source, a.id) < std::tie(b.source, b.id);
                   });
  std::vector<double> cand_e, base_e;
  for (const ReportRow& r : candidates) cand_e.push_back(r.best_energy);
  for (const ReportRow& r : baselines) base_e.push_back(r.best_energy);
  rep.summary.min_diffusion = *std::min_element(cand_e.begin(), cand_e.end());
  rep.summary.median_diffusion = median(cand_e);
  rep.summary.min_random = *std::min_element(base_e.begin(), base_e.end());
  rep.summary.median_random = median(base_e);
  rep.summary.exact = exact;
  if (exact) {
    rep.summary.gap_diffusion = rep.summary.min_diffusion - *exact;
    rep.summary.gap_random = rep.summary.min_random - *exact;
  }
  return rep;
}

void emit_report(const ComparisonReport& report,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "id,source,gate_count,param_count,best_energy,iterations\n";
  for (const ReportRow& r : report.rows)
    out << r.id << ',' << r.source << ',' << r.gate_count << ','
        << r.param_count << ',' << fmt17(r.best_energy) << ',' << r.iterations
        << '\n';
  const ComparisonSummary& s = report.summary;
  out << "# min_diffusion," << fmt17(s.min_diffusion) << '\n';
  out << "# median_diffusion," << fmt17(s.median_diffusion) << '\n';
  out << "# min_random," << fmt17(s.min_random) << '\n';
  out << "# median_random," << fmt17(s.median_random) << '\n';
  if (s.exact) out << "# exact," << fmt17(*s.exact) << '\n';
  if (s.gap_diffusion) out << "# gap_diffusion," << fmt17(*s.gap_diffusion) << '\n';
  if (s.gap_random) out << "# gap_random," << fmt17(*s.gap_random) << '\n';
  if (s.decode_valid_rate)
    out << "# decode_valid_rate," << fmt17(*s.decode_valid_rate) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ReportRow> parse_report_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_rows_text(in, path.string());
}

std::vector<ReportRow> evaluate_circuits(const std::vector<Circuit>& circuits,
                                         const PauliSum& ham,
                                         const std::string& source,
                                         int max_iters, double learning_rate,
                                         std::uint64_t init_stream_seed,
                                         int restarts, int threads) {
  std::vector<ReportRow> rows(circuits.size());
  const Rng stream(init_stream_seed);
  parallel_for(static_cast<int>(circuits.size()), threads, [&](int i) {
    VqeConfig cfg;
    cfg.max_iters = max_iters;
    cfg.learning_rate = learning_rate;
    cfg.seed = stream.derive_seed(static_cast<std::uint64_t>(i));
    const VqeResult res = run_vqe_restarts(circuits[i], ham, cfg, restarts);
    rows[i] = ReportRow{i,
                        source,
                        static_cast<int>(circuits[i].gates.size()),
                        circuits[i].n_params,
                        res.best_energy,
                        res.iterations_run};
  });
  return rows;
}

namespace {

struct DecodeMeta {
  int sample_count = 0;
  std::vector<int> kept_sample_ids;
  std::vector<int> no_parameter_ids;  // candidate ids whose circuit has no Rz
  double valid_rate = 0.0;
};

DecodeMeta read_decode_meta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  DecodeMeta m;
  m.sample_count = j.at("sample_count").get<int>();
  m.kept_sample_ids = j.at("kept_sample_ids").get<std::vector<int>>();
  m.no_parameter_ids = j.at("no_parameter_ids").get<std::vector<int>>();
  m.valid_rate = j.at("decode_valid_rate").get<double>();
  return m;
}

void write_decode_meta(const DecodeMeta& m,
                       const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["sample_count"] = m.sample_count;
  j["kept_sample_ids"] = m.kept_sample_ids;
  j["no_parameter_ids"] = m.no_parameter_ids;
  j["decode_valid_rate"] = m.valid_rate;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error("[" + std::string(name) + "] " + e.what());
  }
}

}  // namespace

void stage_generate(const PipelineConfig& c) {
  const Rng master(c.master_seed);
  DatasetSpec spec{c.n_qubits, c.corpus_count, master.derive_seed("corpus")};
  const std::vector<Circuit> corpus = generate_corpus(spec);
  std::vector<NormalizedImage> images;
  images.reserve(corpus.size());
  for (const Circuit& circ : corpus)
    images.push_back(normalize_to_28(encode_circuit(circ)));
  save_images(images, artifact_dataset(c));
  write_image_sidecar(artifact_dataset(c), c.n_qubits, spec.seed);
}

void stage_train(const PipelineConfig& c) {
  const Rng master(c.master_seed);
  const std::vector<NormalizedImage> images = load_images(artifact_dataset(c));
  MatX<float> data(kImagePixels, images.size());
  for (std::size_t i = 0; i < images.size(); ++i)
    data.col(static_cast<Eigen::Index>(i)) =
        flatten_image<float>(images[i].pixels);
  TrainConfig tc;
  tc.steps = c.train_steps;
  tc.batch_size = c.batch_size;
  tc.learning_rate = c.train_lr;
  tc.seed = master.derive_seed("train");
  tc.T = c.timesteps;
  tc.config_id = c.denoiser;
  tc.threads = c.threads;
  const TrainResult<float> result = train_denoiser(data, tc);
  save_checkpoint(result.params, result.opt, artifact_checkpoint(c));
  write_loss_csv(result.loss_trace, artifact_loss(c));
}

void stage_sample(const PipelineConfig& c) {
  const Rng master(c.master_seed);
  const Checkpoint ckpt = load_checkpoint(artifact_checkpoint(c), c.denoiser);
  const NoiseSchedule s = make_schedule(c.timesteps, 1e-4, 0.01);
  const std::vector<NormalizedImage> images =
      sample(ckpt.params, s, c.sample_count,
             Rng(master.derive_seed("sample")), c.threads);
  save_images(images, artifact_samples(c));
  write_image_sidecar(artifact_samples(c), c.n_qubits,
                      master.derive_seed("sample"));
}

void stage_decode(const PipelineConfig& c) {
  const std::vector<NormalizedImage> images = load_images(artifact_samples(c));
  std::vector<Circuit> circuits;
  DecodeMeta meta;
  meta.sample_count = static_cast<int>(images.size());
  int with_params = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      Decoded d = decode_image(images[i], c.n_qubits);
      if (!d.has_parameters)
        meta.no_parameter_ids.push_back(static_cast<int>(circuits.size()));
      else
        ++with_params;
      meta.kept_sample_ids.push_back(static_cast<int>(i));
      circuits.push_back(std::move(d.circuit));
    } catch (const EmptyDecode&) {
      // Recorded through the valid rate; sample is skipped.
    }
  }
  meta.valid_rate =
      images.empty() ? 0.0
                     : static_cast<double>(with_params) / images.size();
  save_circuits(circuits, artifact_circuits(c));
  write_decode_meta(meta, artifact_decode_meta(c));
}

void stage_vqe(const PipelineConfig& c, const PauliSum& ham) {
  const Rng master(c.master_seed);
  const std::vector<Circuit> candidates = load_circuits(artifact_circuits(c));

  const std::vector<ReportRow> cand_rows = evaluate_circuits(
      candidates, ham, "diffusion", c.vqe_max_iters, c.vqe_learning_rate,
      master.derive_seed("vqe-init"), c.restarts, c.threads);
  write_rows_csv(cand_rows, artifact_candidate_results(c));

  std::vector<Circuit> baselines;
  baselines.reserve(candidates.size());
  const Rng base_stream(master.derive_seed("baseline"));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    Rng r = base_stream.derive(static_cast<std::uint64_t>(i));
    baselines.push_back(random_baseline(
        c.n_qubits, 2 * static_cast<int>(candidates[i].gates.size()), r));
  }
  save_circuits(baselines, artifact_baselines(c));
  const std::vector<ReportRow> base_rows = evaluate_circuits(
      baselines, ham, "random", c.vqe_max_iters, c.vqe_learning_rate,
      master.derive_seed("vqe-init-baseline"), c.restarts, c.threads);
  write_rows_csv(base_rows, artifact_baseline_results(c));
}

ComparisonReport stage_report(const PipelineConfig& c, const PauliSum& ham) {
  const std::vector<ReportRow> cand_rows =
      parse_report_rows(artifact_candidate_results(c));
  const std::vector<ReportRow> base_rows =
      parse_report_rows(artifact_baseline_results(c));
  std::optional<double> exact;
  if (ham.n_qubits <= 10) exact = ground_energy(ham);
  ComparisonReport rep = compare_populations(cand_rows, base_rows, exact);
  rep.summary.decode_valid_rate =
      read_decode_meta(artifact_decode_meta(c)).valid_rate;
  emit_report(rep, artifact_report(c));
  return rep;
}

ComparisonReport run_pipeline(const PipelineConfig& c) {
  c.validate();
  const PauliSum ham = stage("load-hamiltonian", [&] {
    return load_hamiltonian(c.hamiltonian_path);
  });
  if (ham.n_qubits != c.n_qubits)
    throw QubitMismatch("Hamiltonian has " + std::to_string(ham.n_qubits) +
                        " qubits but the pipeline is configured for " +
                        std::to_string(c.n_qubits));
  std::filesystem::create_directories(c.out_dir);
  stage("generate", [&] { stage_generate(c); return 0; });
  stage("train", [&] { stage_train(c); return 0; });
  stage("sample", [&] { stage_sample(c); return 0; });
  stage("decode", [&] { stage_decode(c); return 0; });
  stage("vqe", [&] { stage_vqe(c, ham); return 0; });
  return stage("report", [&] { return stage_report(c, ham); });
}

}  // namespace qcdiff

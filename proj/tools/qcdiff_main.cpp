// qcdiff: UCC-ansatz diffusion pipeline driver.
//
// Subcommands cover the individual pipeline stages (gen-dataset, train,
// sample, decode, vqe, baseline, compare, exact) plus `pipeline`, which runs
// the whole workflow. Exit codes: 0 success, 1 validation error, 2 runtime
// error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "qcdiff/diffusion.hpp"
#include "qcdiff/image.hpp"
#include "qcdiff/pipeline.hpp"
#include "qcdiff/ucc.hpp"

namespace {

using namespace qcdiff;

struct CmdArgs {
  int qubits = 4;
  int count = 10000;
  int gates = 8;
  std::uint64_t seed = 0;
  std::string out, circuits_out, dataset, denoiser = "mlp-small", ckpt;
  std::string images, circuits, ham, candidates, baselines, trace_dir, source =
      "diffusion";
  long steps = 2000;
  int batch = 64;
  double lr = 1e-3;
  int timesteps = 1000;
  int iters = 100;
  double vqe_lr = 0.1;
  int restarts = 1;
  int threads = 1;
  // pipeline extras
  std::string outdir;
  long train_steps = 10000;
  int samples = 16;
};

int cmd_gen_dataset(const CmdArgs& a) {
  DatasetSpec spec{a.qubits, a.count, a.seed};
  const std::vector<Circuit> corpus = generate_corpus(spec);
  std::vector<NormalizedImage> images;
  images.reserve(corpus.size());
  for (const Circuit& c : corpus)
    images.push_back(normalize_to_28(encode_circuit(c)));
  save_images(images, a.out);
  write_image_sidecar(a.out, a.qubits, a.seed);
  if (!a.circuits_out.empty()) save_circuits(corpus, a.circuits_out);
  std::cout << "wrote " << images.size() << " images to " << a.out << "\n";
  return 0;
}

int cmd_train(const CmdArgs& a) {
  const std::vector<NormalizedImage> images = load_images(a.dataset);
  MatX<float> data(kImagePixels, images.size());
  for (std::size_t i = 0; i < images.size(); ++i)
    data.col(static_cast<Eigen::Index>(i)) =
        flatten_image<float>(images[i].pixels);
  TrainConfig tc;
  tc.steps = a.steps;
  tc.batch_size = a.batch;
  tc.learning_rate = a.lr;
  tc.seed = a.seed;
  tc.T = a.timesteps;
  tc.config_id = a.denoiser;
  tc.threads = a.threads;
  const TrainResult<float> result = train_denoiser(data, tc);
  save_checkpoint(result.params, result.opt, a.out);
  write_loss_csv(result.loss_trace, a.out + ".loss.csv");
  std::cout << "final loss " << result.loss_trace.back() << ", checkpoint "
            << a.out << "\n";
  return 0;
}

int cmd_sample(const CmdArgs& a) {
  const Checkpoint ckpt = load_checkpoint(a.ckpt);
  const NoiseSchedule s = make_schedule(a.timesteps, 1e-4, 0.01);
  const std::vector<NormalizedImage> images =
      sample(ckpt.params, s, a.count, Rng(a.seed), a.threads);
  save_images(images, a.out);
  std::cout << "wrote " << images.size() << " samples to " << a.out << "\n";
  return 0;
}

int cmd_decode(const CmdArgs& a) {
  const std::vector<NormalizedImage> images = load_images(a.images);
  std::vector<Circuit> circuits;
  int with_params = 0, empty = 0;
  for (const NormalizedImage& img : images) {
    try {
      Decoded d = decode_image(img, a.qubits);
      if (d.has_parameters) ++with_params;
      circuits.push_back(std::move(d.circuit));
    } catch (const EmptyDecode&) {
      ++empty;
    }
  }
  save_circuits(circuits, a.out);
  const double rate =
      images.empty() ? 0.0 : static_cast<double>(with_params) / images.size();
  std::printf("decoded %zu/%zu (empty %d), decode_valid_rate %.6f\n",
              circuits.size(), images.size(), empty, rate);
  return 0;
}

int cmd_vqe(const CmdArgs& a) {
  const PauliSum ham = load_hamiltonian(a.ham);
  const std::vector<Circuit> circuits = load_circuits(a.circuits);
  for (const Circuit& c : circuits)
    if (c.n_qubits != ham.n_qubits)
      throw QubitMismatch("circuit qubit count does not match Hamiltonian");
  const std::vector<ReportRow> rows =
      evaluate_circuits(circuits, ham, a.source, a.iters, a.vqe_lr, a.seed,
                        a.restarts, a.threads);
  ComparisonReport rep;
  rep.rows = rows;
  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw IoError("cannot open " + a.out + " for writing");
  out << "id,source,gate_count,param_count,best_energy,iterations\n";
  char buf[160];
  for (const ReportRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%d,%d,%.17g,%d\n", r.id,
                  r.source.c_str(), r.gate_count, r.param_count,
                  r.best_energy, r.iterations);
    out << buf;
  }
  if (!a.trace_dir.empty()) {
    std::filesystem::create_directories(a.trace_dir);
    const Rng stream(a.seed);
    for (std::size_t i = 0; i < circuits.size(); ++i) {
      VqeConfig cfg{a.iters, a.vqe_lr, stream.derive_seed(i)};
      const VqeResult res = run_vqe_restarts(circuits[i], ham, cfg, a.restarts);
      write_trace_csv(res, std::filesystem::path(a.trace_dir) /
                               ("trace_" + std::to_string(i) + ".csv"));
    }
  }
  std::cout << "evaluated " << rows.size() << " circuits -> " << a.out << "\n";
  return 0;
}

int cmd_baseline(const CmdArgs& a) {
  std::vector<Circuit> circuits;
  const Rng stream(a.seed);
  for (int i = 0; i < a.count; ++i) {
    Rng r = stream.derive(static_cast<std::uint64_t>(i));
    circuits.push_back(random_baseline(a.qubits, a.gates, r));
  }
  save_circuits(circuits, a.out);
  std::cout << "wrote " << circuits.size() << " baseline circuits to " << a.out
            << "\n";
  return 0;
}

int cmd_compare(const CmdArgs& a) {
  const PauliSum ham = load_hamiltonian(a.ham);
  std::optional<double> exact;
  if (ham.n_qubits <= 10) exact = ground_energy(ham);
  const ComparisonReport rep = compare_populations(
      parse_report_rows(a.candidates), parse_report_rows(a.baselines), exact);
  emit_report(rep, a.out);
  std::printf("min_diffusion %.17g  min_random %.17g\n",
              rep.summary.min_diffusion, rep.summary.min_random);
  return 0;
}

int cmd_exact(const CmdArgs& a) {
  const PauliSum ham = load_hamiltonian(a.ham);
  std::printf("%.17g\n", ground_energy(ham));
  return 0;
}

int cmd_pipeline(const CmdArgs& a) {
  PipelineConfig cfg;
  cfg.n_qubits = a.qubits;
  cfg.corpus_count = a.count;
  cfg.denoiser = a.denoiser;
  cfg.timesteps = a.timesteps;
  cfg.train_steps = a.train_steps;
  cfg.batch_size = a.batch;
  cfg.train_lr = a.lr;
  cfg.sample_count = a.samples;
  cfg.vqe_max_iters = a.iters;
  cfg.vqe_learning_rate = a.vqe_lr;
  cfg.restarts = a.restarts;
  cfg.master_seed = a.seed;
  cfg.threads = a.threads;
  cfg.hamiltonian_path = a.ham;
  cfg.out_dir = a.outdir;
  const ComparisonReport rep = run_pipeline(cfg);
  std::printf("report %s\nmin_diffusion %.17g  min_random %.17g",
              artifact_report(cfg).string().c_str(),
              rep.summary.min_diffusion, rep.summary.min_random);
  if (rep.summary.exact) std::printf("  exact %.17g", *rep.summary.exact);
  std::printf("\n");
  return 0;
}

bool is_validation_error(const Error& e) {
  return dynamic_cast<const InvalidRange*>(&e) ||
         dynamic_cast<const InvalidLetter*>(&e) ||
         dynamic_cast<const QubitMismatch*>(&e) ||
         dynamic_cast<const LengthMismatch*>(&e) ||
         dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const TooManyQubits*>(&e) ||
         dynamic_cast<const TooLarge*>(&e) ||
         dynamic_cast<const AllIdentity*>(&e) ||
         dynamic_cast<const BadTimestep*>(&e) ||
         dynamic_cast<const ShapeMismatch*>(&e) ||
         dynamic_cast<const MissingParameter*>(&e) ||
         dynamic_cast<const EmptyCircuit*>(&e) ||
         dynamic_cast<const EmptyPopulation*>(&e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UCC-ansatz diffusion pipeline"};
  app.require_subcommand(1);
  CmdArgs a;

  auto* gen = app.add_subcommand("gen-dataset",
                                 "generate a UCC corpus and its image set");
  gen->add_option("--qubits", a.qubits)->required();
  gen->add_option("--count", a.count)->capture_default_str();
  gen->add_option("--seed", a.seed)->required();
  gen->add_option("--out", a.out)->required();
  gen->add_option("--circuits-out", a.circuits_out,
                  "also export the corpus circuits as JSON");

  auto* train = app.add_subcommand("train", "train a denoiser on a dataset");
  train->add_option("--dataset", a.dataset)->required();
  train->add_option("--denoiser", a.denoiser)->capture_default_str();
  train->add_option("--timesteps", a.timesteps)->capture_default_str();
  train->add_option("--steps", a.steps)->capture_default_str();
  train->add_option("--batch", a.batch)->capture_default_str();
  train->add_option("--lr", a.lr)->capture_default_str();
  train->add_option("--seed", a.seed)->required();
  train->add_option("--out", a.out)->required();
  train->add_option("--threads", a.threads)->capture_default_str();

  auto* smp = app.add_subcommand("sample", "draw images from a checkpoint");
  smp->add_option("--ckpt", a.ckpt)->required();
  smp->add_option("--count", a.count)->required();
  smp->add_option("--seed", a.seed)->required();
  smp->add_option("--out", a.out)->required();
  smp->add_option("--timesteps", a.timesteps)->capture_default_str();
  smp->add_option("--threads", a.threads)->capture_default_str();

  auto* dec = app.add_subcommand("decode", "decode images into circuits");
  dec->add_option("--images", a.images)->required();
  dec->add_option("--qubits", a.qubits)->required();
  dec->add_option("--out", a.out)->required();

  auto* vqe = app.add_subcommand("vqe", "run VQE over a circuit list");
  vqe->add_option("--circuits", a.circuits)->required();
  vqe->add_option("--ham", a.ham)->required();
  vqe->add_option("--iters", a.iters)->capture_default_str();
  vqe->add_option("--lr", a.vqe_lr)->capture_default_str();
  vqe->add_option("--seed", a.seed)->required();
  vqe->add_option("--out", a.out)->required();
  vqe->add_option("--source", a.source)->capture_default_str();
  vqe->add_option("--restarts", a.restarts)->capture_default_str();
  vqe->add_option("--trace-dir", a.trace_dir,
                  "write per-circuit energy traces here");
  vqe->add_option("--threads", a.threads)->capture_default_str();

  auto* base = app.add_subcommand("baseline", "generate random circuits");
  base->add_option("--qubits", a.qubits)->required();
  base->add_option("--gates", a.gates)->required();
  base->add_option("--count", a.count)->required();
  base->add_option("--seed", a.seed)->required();
  base->add_option("--out", a.out)->required();

  auto* cmp = app.add_subcommand("compare",
                                 "merge candidate/baseline VQE results");
  cmp->add_option("--candidates", a.candidates)->required();
  cmp->add_option("--baselines", a.baselines)->required();
  cmp->add_option("--ham", a.ham)->required();
  cmp->add_option("--out", a.out)->required();

  auto* ex = app.add_subcommand("exact", "exact ground energy of a .ham file");
  ex->add_option("--ham", a.ham)->required();

  auto* pipe = app.add_subcommand("pipeline", "run the full workflow");
  pipe->add_option("--qubits", a.qubits)->required();
  pipe->add_option("--ham", a.ham)->required();
  pipe->add_option("--outdir", a.outdir)->required();
  pipe->add_option("--seed", a.seed)->required();
  pipe->add_option("--corpus-count", a.count)->capture_default_str();
  pipe->add_option("--denoiser", a.denoiser)->capture_default_str();
  pipe->add_option("--timesteps", a.timesteps)->capture_default_str();
  pipe->add_option("--train-steps", a.train_steps)->capture_default_str();
  pipe->add_option("--batch", a.batch)->capture_default_str();
  pipe->add_option("--train-lr", a.lr)->capture_default_str();
  pipe->add_option("--samples", a.samples)->capture_default_str();
  pipe->add_option("--vqe-iters", a.iters)->capture_default_str();
  pipe->add_option("--vqe-lr", a.vqe_lr)->capture_default_str();
  pipe->add_option("--restarts", a.restarts)->capture_default_str();
  pipe->add_option("--threads", a.threads)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  try {
    if (gen->parsed()) return cmd_gen_dataset(a);
    if (train->parsed()) return cmd_train(a);
    if (smp->parsed()) return cmd_sample(a);
    if (dec->parsed()) return cmd_decode(a);
    if (vqe->parsed()) return cmd_vqe(a);
    if (base->parsed()) return cmd_baseline(a);
    if (cmp->parsed()) return cmd_compare(a);
    if (ex->parsed()) return cmd_exact(a);
    if (pipe->parsed()) return cmd_pipeline(a);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation_error(e) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

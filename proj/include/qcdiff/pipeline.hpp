#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcdiff/circuit.hpp"
#include "qcdiff/pauli_sum.hpp"
#include "qcdiff/vqe.hpp"

namespace qcdiff {

/// Five-stage workflow configuration: generate -> encode -> train -> sample
/// -> decode -> VQE -> report. Artifacts live under out_dir with fixed
/// names (see artifact_* helpers).
struct PipelineConfig {
  int n_qubits = 4;
  int corpus_count = 10000;
  std::string denoiser = "unet-small";
  int timesteps = 1000;
  long train_steps = 10000;
  int batch_size = 64;
  double train_lr = 1e-3;
  int sample_count = 16;
  int vqe_max_iters = 100;
  double vqe_learning_rate = 0.1;
  int restarts = 1;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::filesystem::path hamiltonian_path;
  std::filesystem::path out_dir;

  void validate() const;
};

std::filesystem::path artifact_dataset(const PipelineConfig& c);
std::filesystem::path artifact_checkpoint(const PipelineConfig& c);
std::filesystem::path artifact_loss(const PipelineConfig& c);
std::filesystem::path artifact_samples(const PipelineConfig& c);
std::filesystem::path artifact_circuits(const PipelineConfig& c);
std::filesystem::path artifact_decode_meta(const PipelineConfig& c);
std::filesystem::path artifact_baselines(const PipelineConfig& c);
std::filesystem::path artifact_candidate_results(const PipelineConfig& c);
std::filesystem::path artifact_baseline_results(const PipelineConfig& c);
std::filesystem::path artifact_report(const PipelineConfig& c);

struct ReportRow {
  int id = 0;
  std::string source;  // "diffusion" or "random"
  int gate_count = 0;
  int param_count = 0;
  double best_energy = 0.0;
  int iterations = 0;

  bool operator==(const ReportRow&) const = default;
};

struct ComparisonSummary {
  double min_diffusion = 0.0;
  double median_diffusion = 0.0;
  double min_random = 0.0;
  double median_random = 0.0;
  std::optional<double> exact;
  std::optional<double> gap_diffusion;
  std::optional<double> gap_random;
  std::optional<double> decode_valid_rate;
};

struct ComparisonReport {
  std::vector<ReportRow> rows;  // ordered by (source, id)
  ComparisonSummary summary;
};

/// Population summary; throws EmptyPopulation when either side is empty.
ComparisonReport compare_populations(const std::vector<ReportRow>& candidates,
                                     const std::vector<ReportRow>& baselines,
                                     std::optional<double> exact);

/// CSV report: fixed header row, 17-significant-digit energies, summary
/// appended as `#`-prefixed comment lines.
void emit_report(const ComparisonReport& report,
                 const std::filesystem::path& path);

/// Rows only; `#` lines are ignored.
std::vector<ReportRow> parse_report_rows(const std::filesystem::path& path);

// Individual stages (also used by the CLI subcommands). Each is a pure
// function of its inputs plus the stage seed derived from the master seed,
// so deleting an artifact and re-running its stage reproduces it bitwise.
void stage_generate(const PipelineConfig& c);
void stage_train(const PipelineConfig& c);
void stage_sample(const PipelineConfig& c);
void stage_decode(const PipelineConfig& c);
void stage_vqe(const PipelineConfig& c, const PauliSum& ham);
ComparisonReport stage_report(const PipelineConfig& c, const PauliSum& ham);

/// Runs every stage in order and returns the final report.
ComparisonReport run_pipeline(const PipelineConfig& c);

std::vector<ReportRow> evaluate_circuits(const std::vector<Circuit>& circuits,
                                         const PauliSum& ham,
                                         const std::string& source,
                                         int max_iters, double learning_rate,
                                         std::uint64_t init_stream_seed,
                                         int restarts, int threads);

}  // namespace qcdiff

#include "yfstab/runner.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace yfstab {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DegenerateMasses:
    case ErrorCode::PoleProximity:
    case ErrorCode::UnsupportedOrder:
    case ErrorCode::InsufficientN:
      return 2;
    case ErrorCode::NonConverged:
    case ErrorCode::SmoothnessViolation:
      return 3;
    default:
      return 4;
  }
}

namespace {

class Writer {
 public:
  Writer(const RunConfig& config, RunResult& result) : config_(config), result_(result) {
    dir_ = config.output_directory;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::ConfigInvalid, "output.directory: cannot create " + dir_.string());
  }

  json envelope(const std::string& key, json payload) const {
    return {{"tool", kToolName}, {"version", kToolVersion}, {"config", config_.to_json(false)}, {key, std::move(payload)}};
  }

  void json_file(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

  // Provenance goes into leading '#' lines; the header row follows.
  void csv_file(const std::string& name, const std::string& body) {
    std::string text = std::string("# tool: ") + kToolName + " " + kToolVersion + "\n";
    text += "# config: " + config_.to_json(false).dump() + "\n";
    write(name, text + body);
  }

 private:
  void write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorCode::ConfigInvalid, "output.directory: cannot write " + path.string());
    result_.files.push_back(path.string());
  }

  const RunConfig& config_;
  RunResult& result_;
  std::filesystem::path dir_;
};

std::array<WavePacket, 3> build_triple(const std::vector<PacketSpec>& specs) {
  return {specs[0].build(), specs[1].build(), specs[2].build()};
}

bool significant(const DecayResult& r, double k) { return std::abs(r.estimate) > k * r.stderr_; }

void run_counterexample(const RunConfig& config, RunResult& result) {
  const ModelParams params = config.params();
  const auto h = build_triple(config.packets);
  result.amplitudes.emplace_back("decay", decay_amplitude(h[0], h[1], h[2], params, config.decay()));
  if (!config.control_packets.empty()) {
    const auto c = build_triple(config.control_packets);
    result.amplitudes.emplace_back("control", decay_amplitude(c[0], c[1], c[2], params, config.decay()));
  }
  const ThreePointOptions opt = config.three_point();
  result.grams.push_back(gram_matrix(witness_family(params), params, opt));
  result.grams.push_back(gram_matrix(positive_subfamily(params), params, opt));
}

json amplitude_records(const RunResult& r) {
  json records = json::array();
  for (const auto& [label, a] : r.amplitudes) {
    json j = a.to_json();
    j["label"] = label;
    records.push_back(j);
  }
  return records;
}

std::string amplitude_csv(const RunResult& r) {
  std::ostringstream os;
  os << "label,estimate_re,estimate_im,stderr,samples,seed,sigma_shell_ladder,zero_overlap\n";
  for (const auto& [label, a] : r.amplitudes) {
    os << label << ',' << format_double(a.estimate.real()) << ',' << format_double(a.estimate.imag()) << ','
       << format_double(a.stderr_) << ',' << a.samples << ',' << a.seed << ',' << format_double(a.sigma_ladder[0])
       << ';' << format_double(a.sigma_ladder[1]) << ';' << format_double(a.sigma_ladder[2]) << ','
       << (a.zero_overlap ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string gram_csv(const RunResult& r) {
  std::ostringstream os;
  os << "family_fixture_id,row,col,re,im\n";
  for (const auto& g : r.grams) {
    for (Eigen::Index i = 0; i < g.matrix.rows(); ++i) {
      for (Eigen::Index k = 0; k < g.matrix.cols(); ++k) {
        os << g.family_fixture_id << ',' << i << ',' << k << ',' << format_double(g.matrix(i, k).real()) << ','
           << format_double(g.matrix(i, k).imag()) << '\n';
      }
    }
  }
  return os.str();
}

std::string eigen_csv(const RunResult& r) {
  std::ostringstream os;
  os << "family_fixture_id,index,eigenvalue,spectral_norm\n";
  for (const auto& g : r.grams) {
    for (Eigen::Index i = 0; i < g.eigenvalues.size(); ++i) {
      os << g.family_fixture_id << ',' << i << ',' << format_double(g.eigenvalues[i]) << ','
         << format_double(g.norm) << '\n';
    }
  }
  return os.str();
}

json summary_payload(const RunConfig& config, const RunResult& r) {
  json s{{"stability_verdict", nullptr}, {"indefinite_witness_found", nullptr}, {"decay_amplitude_significant", nullptr}};
  if (r.stability) {
    s["stability_verdict"] = to_string(r.stability->verdict);
    s["stability_branch"] = r.stability->branch;
  }
  if (!r.grams.empty()) {
    const GramResult& w = r.grams.front();
    s["indefinite_witness_found"] = w.min_eigenvalue < -config.gram_neg * w.norm;
    s["witness_min_eigenvalue"] = w.min_eigenvalue;
    if (r.grams.size() > 1) {
      const GramResult& p = r.grams[1];
      s["positive_subfamily_psd"] = p.min_eigenvalue >= -1e-8 * p.norm;
    }
  }
  for (const auto& [label, a] : r.amplitudes) {
    if (label == "decay") s["decay_amplitude_significant"] = significant(a, config.significance);
    if (label == "control") s["control_amplitude_zero"] = a.zero_overlap;
  }
  return s;
}

void write_outputs(const RunConfig& config, RunResult& result) {
  Writer w(config, result);
  if (result.stability) {
    if (config.wants("csv")) w.csv_file("stability_report.csv", result.stability->to_csv());
    if (config.wants("json")) w.json_file("stability_report.json", w.envelope("report", result.stability->to_json()));
  }
  if (!result.amplitudes.empty()) {
    if (config.wants("csv")) w.csv_file("amplitudes.csv", amplitude_csv(result));
    if (config.wants("json")) w.json_file("amplitudes.json", w.envelope("records", amplitude_records(result)));
  }
  if (!result.grams.empty()) {
    if (config.wants("csv")) {
      w.csv_file("gram_matrix.csv", gram_csv(result));
      w.csv_file("gram_eigenvalues.csv", eigen_csv(result));
    }
    if (config.wants("json")) {
      json records = json::array();
      for (const auto& g : result.grams) records.push_back(g.to_json());
      w.json_file("gram.json", w.envelope("records", records));
    }
  }
  json doc{{"tool", kToolName}, {"version", kToolVersion}, {"config", config.to_json(false)}};
  const json payload = summary_payload(config, result);
  for (const auto& [k, v] : payload.items()) doc[k] = v;
  w.json_file("summary.json", doc);
  result.summary = doc;
}

}  // namespace

RunResult run(const RunConfig& config) {
  RunResult result;
  if (config.mode != RunMode::Counterexample) result.stability = run_stability(config.stability());
  if (config.mode != RunMode::Stability) run_counterexample(config, result);
  write_outputs(config, result);
  return result;
}

RunResult convergence_report(const RunConfig& config) {
  RunResult result;
  Writer w(config, result);
  json doc = json::object();
  if (config.mode != RunMode::Counterexample) {
    const StabilityReport report = run_stability(config.stability());
    std::ostringstream os;
    os << "n,support_halfwidth,pairing_re,pairing_drift,kl_norm,kl_ratio,bound_integral\n";
    json rows = json::array();
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      const StabilityRow& r = report.rows[i];
      const double drift = i == 0 ? 0.0 : r.pairing.real() / report.rows[0].pairing.real() - 1.0;
      const double ratio = i == 0 || report.rows[i - 1].kl_norm == 0.0 ? 0.0 : r.kl_norm / report.rows[i - 1].kl_norm;
      const double half = 2.0 / r.n;
      os << r.n << ',' << format_double(half) << ',' << format_double(r.pairing.real()) << ','
         << format_double(drift) << ',' << format_double(r.kl_norm) << ',' << format_double(ratio) << ','
         << format_double(r.bound_integral) << '\n';
      rows.push_back({{"n", r.n},
                      {"support_halfwidth", half},
                      {"pairing_re", r.pairing.real()},
                      {"pairing_drift", drift},
                      {"kl_norm", r.kl_norm},
                      {"kl_ratio", ratio},
                      {"bound_integral", r.bound_integral}});
    }
    if (config.wants("csv")) w.csv_file("convergence.csv", os.str());
    doc["stability"] = {{"verdict", to_string(report.verdict)}, {"rows", rows}};
    result.stability = report;
  }
  if (config.mode != RunMode::Stability) {
    const auto h = build_triple(config.packets);
    const DecayResult a = decay_amplitude(h[0], h[1], h[2], config.params(), config.decay());
    std::ostringstream os;
    os << "sigma_shell,estimate_re,estimate_im\n";
    json rows = json::array();
    for (int s = 0; s < 3; ++s) {
      const cplx e = cplx(0.0, 2.0 * M_PI) * a.per_sigma[s];
      os << format_double(a.sigma_ladder[s]) << ',' << format_double(e.real()) << ',' << format_double(e.imag())
         << '\n';
      rows.push_back({{"sigma_shell", a.sigma_ladder[s]}, {"estimate_re", e.real()}, {"estimate_im", e.imag()}});
    }
    os << "0," << format_double(a.estimate.real()) << ',' << format_double(a.estimate.imag()) << '\n';
    rows.push_back({{"sigma_shell", 0.0}, {"estimate_re", a.estimate.real()}, {"estimate_im", a.estimate.imag()}});
    if (config.wants("csv")) w.csv_file("decay_convergence.csv", os.str());
    doc["decay"] = {{"rows", rows}, {"stderr", a.stderr_}};
    result.amplitudes.emplace_back("decay", a);
  }
  if (config.wants("json")) w.json_file("convergence.json", w.envelope("convergence", doc));
  result.summary = doc;
  return result;
}

}  // namespace yfstab

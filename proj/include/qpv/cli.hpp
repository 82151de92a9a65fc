// Copyright 2026 The qpv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. run() is usable in-process; the qpv binary only
// forwards argv to it.
//
// Exit codes: 0 success, 1 verification rejected, 2 input or usage error.

#ifndef QPV_CLI_HPP
#define QPV_CLI_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qpv/io.hpp"

namespace qpv::cli {

inline constexpr int kOk = 0;
inline constexpr int kRejected = 1;
inline constexpr int kInputError = 2;

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Canned names plus hypergraph_czN and filter_half (K = diag(1, 1/2)).
inline bool is_builtin(const std::string& name) {
  for (const auto& n : canned_names()) {
    if (n == name) return true;
  }
  return name == "filter_half" || name.rfind("hypergraph_cz", 0) == 0;
}

inline CMatrix half_filter() {
  CMatrix k(2, 2);
  k << 1, 0, 0, 0.5;
  return k;
}

inline std::size_t hypergraph_n(const std::string& name) {
  const std::string tail = name.substr(std::string("hypergraph_cz").size());
  if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("protocol", "expected hypergraph_czN with N an integer");
  }
  return static_cast<std::size_t>(std::stoul(tail));
}

inline AAPVStrategy resolve_protocol(const std::string& spec) {
  if (spec.empty()) throw ParseError("protocol", "missing --protocol");
  try {
    if (is_builtin(spec)) {
      if (spec == "filter_half") return filter_protocol(half_filter(), spec);
      if (spec.rfind("hypergraph_cz", 0) == 0) return hypergraph_cz_protocol(hypergraph_n(spec));
      return canned(spec);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError("protocol", e.what());
  }
  if (!std::filesystem::exists(spec)) {
    throw ParseError("protocol", "'" + spec + "' is neither a protocol name nor a file");
  }
  return io::get_strategy(io::read_file(spec));
}

/// Ideal process for a built-in protocol name.
inline std::optional<QuantumProcess> builtin_target(const std::string& spec) {
  if (!is_builtin(spec)) return std::nullopt;
  if (spec == "filter_half") return QuantumProcess::kraus({half_filter()}, qubit_dims(1));
  if (spec.rfind("hypergraph_cz", 0) == 0) return hypergraph_cz_target(hypergraph_n(spec));
  return canned_target(spec);
}

namespace detail {

struct Emitter {
  std::ostream& out;
  std::string path;

  void operator()(const std::string& text) const {
    if (path.empty()) {
      out << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("out", "cannot write '" + path + "'");
    f << text;
  }
};

inline double need_unit(double v, const char* name, bool open_low = true) {
  if (!(open_low ? v > 0.0 : v >= 0.0) || !(v < 1.0)) {
    throw ParseError(name, "must lie in " + std::string(open_low ? "(0,1)" : "[0,1)"));
  }
  return v;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum process verification toolkit", "qpv"};
  app.require_subcommand(1);

  std::string protocol, circuit, process, out_path, format = "json", mode = "projector",
                                                    povm, target = "computational", bundle,
                                                    granularity = "per_qubit", plan_format = "text";
  double epsilon = -1.0, delta = -1.0, nu = -1.0;
  std::uint64_t rounds = 0, seed = 0, max_attempts = 0;
  std::size_t trials = 10000;
  bool full_group = false, use_pmpv = false;

  auto* build = app.add_subcommand("build", "Emit a strategy as JSON");
  build->add_option("--protocol", protocol, "Protocol name");
  build->add_option("--circuit", circuit, "Clifford circuit JSON file");
  build->add_flag("--full-group", full_group, "Use every stabilizer instead of the generators");
  build->add_option("--out", out_path);

  auto* gap = app.add_subcommand("gap", "Spectral gap of a strategy");
  gap->add_option("--protocol", protocol)->required();

  auto* plan = app.add_subcommand("plan", "Number of rounds for given epsilon, delta, nu");
  plan->add_option("--epsilon", epsilon)->required();
  plan->add_option("--delta", delta)->required();
  plan->add_option("--nu", nu);
  plan->add_option("--protocol", protocol);
  plan->add_option("--format", plan_format)->check(CLI::IsMember({"text", "json"}));

  auto* convert = app.add_subcommand("convert", "AAPV strategy to PMPV ensemble");
  convert->add_option("--protocol", protocol)->required();
  convert->add_option("--granularity", granularity)->check(CLI::IsMember({"per_qubit", "parity"}));
  convert->add_option("--out", out_path);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo verification run");
  simulate->add_option("--protocol", protocol)->required();
  simulate->add_option("--process", process, "Process JSON file (default: ideal target)");
  simulate->add_option("--rounds", rounds);
  simulate->add_option("--seed", seed);
  simulate->add_option("--mode", mode)->check(CLI::IsMember({"projector", "local"}));
  simulate->add_flag("--pmpv", use_pmpv, "Run the converted prepare-and-measure protocol");
  simulate->add_option("--max-attempts", max_attempts);
  simulate->add_option("--epsilon", epsilon);
  simulate->add_option("--delta", delta);
  simulate->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--out", out_path);

  auto* oracle = app.add_subcommand("oracle", "Worst-case pass probability report");
  oracle->add_option("--protocol", protocol)->required();
  oracle->add_option("--epsilon", epsilon)->required();
  oracle->add_option("--trials", trials);
  oracle->add_option("--seed", seed);
  oracle->add_option("--out", out_path);

  auto* vmeas = app.add_subcommand("verify-meas", "Verify a measurement device");
  vmeas->add_option("--povm", povm)->required();
  vmeas->add_option("--target", target, "Basis JSON file or 'computational'");
  vmeas->add_option("--epsilon", epsilon)->required();
  vmeas->add_option("--delta", delta)->required();
  vmeas->add_option("--rounds", rounds);
  vmeas->add_option("--seed", seed);
  vmeas->add_option("--out", out_path);

  auto* report = app.add_subcommand("report", "Summary table of simulation results");
  report->add_option("--bundle", bundle)->required();

  std::vector<std::string> argv_store{"qpv"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  const detail::Emitter emit{out, out_path};
  try {
    if (build->parsed()) {
      AAPVStrategy s;
      if (!circuit.empty()) {
        const auto c = io::get_circuit(io::read_file(circuit), "circuit");
        const auto g = choi_stabilizers(c);
        s = full_group ? full_group_protocol(g, c.num_qubits(), "circuit_full_group")
                       : generator_protocol(g, c.num_qubits(), "circuit_generators");
      } else {
        s = resolve_protocol(protocol);
      }
      emit(io::canonical(io::strategy_json(s)));
      return kOk;
    }
    if (gap->parsed()) {
      out << fmt("%.12g", spectral_gap(resolve_protocol(protocol))) << "\n";
      return kOk;
    }
    if (plan->parsed()) {
      detail::need_unit(epsilon, "epsilon");
      detail::need_unit(delta, "delta");
      if (nu < 0.0) {
        if (protocol.empty()) throw ParseError("nu", "give --nu or --protocol");
        nu = spectral_gap(resolve_protocol(protocol));
      }
      if (!(nu > 0.0 && nu <= 1.0)) throw ParseError("nu", "must lie in (0,1]");
      const SamplePlan p = plan_samples(epsilon, delta, nu);
      if (plan_format == "json") {
        out << io::canonical({{"epsilon", p.epsilon}, {"delta", p.delta}, {"nu", p.nu},
                              {"N", p.N}, {"approx", p.approx}});
      } else {
        out << p.N << "\n" << "approx " << fmt("%.6f", p.approx) << "\n";
      }
      return kOk;
    }
    if (convert->parsed()) {
      const auto s = resolve_protocol(protocol);
      const auto g = granularity == "parity" ? OneWayGranularity::parity : OneWayGranularity::per_qubit;
      emit(io::canonical(io::pmpv_json(to_pmpv(s, g))));
      return kOk;
    }
    if (simulate->parsed()) {
      const auto s = resolve_protocol(protocol);
      std::string noise = "none";
      std::optional<QuantumProcess> e;
      if (!process.empty()) {
        const auto pj = io::read_file(process);
        e = io::get_process(pj, "process");
        if (pj.contains("noise")) noise = noise_label(io::get_noise(pj["noise"], "process.noise"));
      } else {
        e = builtin_target(protocol);
        if (!e) throw ParseError("process", "--process is required for strategy files");
      }
      const double gap_value = spectral_gap(s);
      if (rounds == 0) {
        if (epsilon < 0.0 || delta < 0.0) throw ParseError("rounds", "give --rounds or --epsilon and --delta");
        rounds = plan_samples(detail::need_unit(epsilon, "epsilon"), detail::need_unit(delta, "delta"),
                              gap_value).N;
      }
      RunConfig cfg{rounds, seed, mode == "local" ? SamplingMode::local_sequential : SamplingMode::projector,
                    max_attempts};
      const RunResult r = use_pmpv ? simulate_pmpv(to_pmpv(s), *e, cfg) : simulate_aapv(s, *e, cfg);
      const double eps = epsilon >= 0.0 ? detail::need_unit(epsilon, "epsilon") : 0.0;
      const double delta_bound = epsilon >= 0.0 ? r.delta_bound_at(eps, gap_value) : 1.0;
      if (format == "csv") {
        std::string text = "protocol,noise,N,passes,rate,delta_bound\n";
        text += protocol + "," + noise + "," + std::to_string(r.rounds_executed) + "," +
                std::to_string(r.passes) + "," + fmt("%.17g", r.empirical_pass_rate()) + "," +
                fmt("%.17g", delta_bound) + "\n";
        emit(text);
      } else {
        io::json j = io::run_json(r);
        j["protocol"] = protocol;
        j["noise"] = noise;
        j["seed"] = seed;
        j["mode"] = mode;
        j["scheme"] = use_pmpv ? "pmpv" : "aapv";
        j["nu"] = gap_value;
        if (epsilon >= 0.0) {
          j["epsilon"] = eps;
          j["delta_bound"] = delta_bound;
        }
        emit(io::canonical(j));
      }
      return r.accepted ? kOk : kRejected;
    }
    if (oracle->parsed()) {
      detail::need_unit(epsilon, "epsilon", false);
      if (trials == 0) throw ParseError("trials", "must be at least 1");
      const auto s = resolve_protocol(protocol);
      emit(io::canonical(io::report_json(worst_case_report(s, epsilon, trials, seed))));
      return kOk;
    }
    if (vmeas->parsed()) {
      const auto m = io::get_povm(io::read_file(povm), "povm");
      const auto p = target == "computational"
                         ? ProjectiveTarget::computational(Dims{m.dim()})
                         : io::get_projective_target(io::read_file(target), m.dim(), "target");
      detail::need_unit(epsilon, "epsilon");
      detail::need_unit(delta, "delta");
      const std::uint64_t n = rounds ? rounds : plan_measurement_samples(epsilon, delta);
      const RunResult r = verify_measurement(m, p, n, seed);
      io::json j = io::run_json(r);
      j["fidelity"] = measurement_fidelity(m, p);
      j["epsilon"] = epsilon;
      j["delta"] = delta;
      j["seed"] = seed;
      j["delta_bound"] = r.delta_bound_at(epsilon, 1.0);
      emit(io::canonical(j));
      return r.accepted ? kOk : kRejected;
    }
    if (report->parsed()) {
      const io::json doc = io::read_file(bundle);
      const io::json runs = doc.is_array() ? doc : doc.contains("runs") ? doc["runs"] : io::json::array({doc});
      out << std::left << std::setw(16) << "protocol" << std::setw(26) << "noise" << std::right
          << std::setw(9) << "N" << std::setw(9) << "passes" << std::setw(7) << "fails"
          << std::setw(12) << "rate" << std::setw(10) << "verdict" << std::setw(14) << "delta"
          << "\n";
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::string path = "runs[" + std::to_string(i) + "]";
        const RunResult r = io::get_run(runs[i], path);
        const std::string name = runs[i].value("protocol", std::string("-"));
        std::string delta_text = "-";
        if (runs[i].contains("epsilon")) {
          const double eps = io::get_double(runs[i]["epsilon"], path + ".epsilon");
          double g;
          if (is_builtin(name)) {
            g = spectral_gap(resolve_protocol(name));
          } else {
            g = io::get_double(io::need(runs[i], "nu", path), path + ".nu");
          }
          delta_text = fmt("%.6g", r.delta_bound_at(eps, g));
        }
        out << std::left << std::setw(16) << name << std::setw(26)
            << runs[i].value("noise", std::string("-")) << std::right << std::setw(9)
            << r.rounds_executed << std::setw(9) << r.passes << std::setw(7) << r.fails
            << std::setw(12) << fmt("%.6f", r.empirical_pass_rate()) << std::setw(10)
            << (r.accepted ? "accept" : "reject") << std::setw(14) << delta_text << "\n";
      }
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace qpv::cli

#endif  // QPV_CLI_HPP

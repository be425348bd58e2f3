// Command-line driver: spectrum, pauli, qsci, baseline, model-validate.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rovib/baselines.hpp"
#include "rovib/manifest.hpp"
#include "rovib/pauli.hpp"
#include "rovib/qsci.hpp"
#include "rovib/watson.hpp"

namespace fs = std::filesystem;
using namespace rovib;

namespace {

RovibBasisState parse_ref(const std::string& s, int n_modes) {
  RovibBasisState b;
  if (static_cast<int>(s.size()) != n_modes)
    throw ValidationError("reference label '" + s + "' must have one digit per mode");
  for (char c : s) {
    if (c < '0' || c > '9') throw ValidationError("bad reference label '" + s + "'");
    b.v.push_back(c - '0');
  }
  return b;
}

std::vector<RovibBasisState> parse_refs(const std::string& csv, int n_modes) {
  std::vector<RovibBasisState> refs;
  std::string tok;
  std::istringstream ss(csv);
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) refs.push_back(parse_ref(tok, n_modes));
  if (refs.empty()) throw ValidationError("no reference states given");
  return refs;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + dir);
}

RunManifest base_manifest(const std::string& cmd, const std::string& model_path) {
  RunManifest man;
  man.command = cmd;
  man.model_path = model_path;
  man.model_hash = fnv1a_hash_file(model_path);
  return man;
}

int cmd_spectrum(const std::string& model_path, int vmax, int J, const std::string& groups,
                 int n_lowest, const std::string& outdir) {
  const auto model = load_model(model_path);
  const auto frame = derive_frame(model);
  const unsigned mask = parse_group_mask(groups);
  const auto H = build_masked(model, frame, vmax, J, mask);
  const auto sp = dense_spectrum(H, n_lowest, true);

  ensure_dir(outdir);
  BasisIndexer idx(model.n_modes(), vmax, J);
  BasisSet full;
  for (int i = 0; i < idx.dim(); ++i) full.states.push_back(idx.state(i));

  std::ofstream csv(outdir + "/spectrum.csv");
  csv << "index,energy_cm1,delta_cm1,label,parity\n";
  for (int i = 0; i < sp.eigenvalues.size(); ++i) {
    const auto lab = assign_label(sp.eigenvectors.col(i), full, frame, J);
    // dominant-component parity
    int pos = 0;
    sp.eigenvectors.col(i).cwiseAbs().maxCoeff(&pos);
    csv << i << "," << format_cm1(sp.eigenvalues(i)) << ","
        << format_cm1(sp.eigenvalues(i) - sp.eigenvalues(0)) << "," << lab.str(J) << ","
        << (full.states[pos].parity() > 0 ? "+" : "-") << "\n";
  }
  auto man = base_manifest("spectrum", model_path);
  man.params["vmax"] = std::to_string(vmax);
  man.params["J"] = std::to_string(J);
  man.params["groups"] = group_mask_name(mask);
  man.params["n_lowest"] = std::to_string(n_lowest);
  man.write(outdir + "/manifest.json");
  std::cout << "wrote " << outdir << "/spectrum.csv (" << sp.eigenvalues.size()
            << " levels)\n";
  return 0;
}

int cmd_pauli(const std::string& model_path, int vmax, int J, double lambda,
              const std::string& direction, const std::string& method,
              const std::string& fit_js, int scaling_ell, const std::string& outdir) {
  const auto model = load_model(model_path);
  const auto frame = derive_frame(model);
  ensure_dir(outdir);

  PauliSum sum;
  if (method == "factored") {
    sum = pauli_decompose_factored(model, frame, vmax, J);
  } else if (method == "trace") {
    const QubitLayout lay(model.n_modes(), vmax, J);
    const auto H = build_full(model, frame, vmax, J);
    sum = pauli_decompose_trace(pad_to_qubit_space(H, lay), lay.nq());
    sum.vmax = vmax;
    sum.J = J;
    sum.sort_canonical();
  } else {
    throw ValidationError("method must be trace or factored");
  }
  write_pauli_sum(sum, outdir + "/pauli_sum.txt");

  std::ofstream stats(outdir + "/stats.txt");
  stats << "L_q " << sum.size() << "\n";
  if (lambda > 0) {
    const auto dir = direction == "below" ? CutoffDirection::Below : CutoffDirection::Above;
    const auto cut = cutoff_filter(sum, lambda, dir);
    const auto st = term_statistics(cut);
    stats << "lambda_cm1 " << lambda << " direction " << direction << "\n";
    stats << "terms_kept " << cut.size() << "\n";
    long gates = 0;
    for (std::size_t w = 1; w < st.count_by_weight.size(); ++w) gates += st.count_by_weight[w];
    stats << "terms_kept_nonidentity " << gates << "\n";
    for (std::size_t w = 0; w < st.count_by_weight.size(); ++w)
      if (st.count_by_weight[w]) stats << "weight_" << w << " " << st.count_by_weight[w] << "\n";
  }
  if (!fit_js.empty()) {
    std::vector<int> Js;
    std::istringstream ss(fit_js);
    std::string tok;
    while (std::getline(ss, tok, ',')) Js.push_back(std::stoi(tok));
    std::vector<long> counts;
    const auto fit = fit_Lq_vs_J(model, frame, vmax, Js, &counts);
    stats << "fit_c " << fit.c << " fit_kappa " << fit.kappa << "\n";
    for (std::size_t i = 0; i < Js.size(); ++i)
      stats << "L_q_at_J_" << Js[i] << " " << counts[i] << "\n";
  }
  if (scaling_ell > 0) {
    const auto st = scaling_study(scaling_ell, 9);
    stats << "scaling_ell " << scaling_ell << " fit_b " << st.fit_b << " fit_c " << st.fit_c
          << "\n";
    for (std::size_t i = 0; i < st.eta.size(); ++i)
      stats << "count_eta_" << st.eta[i] << " " << st.counts[i] << "\n";
  }
  auto man = base_manifest("pauli", model_path);
  man.params["vmax"] = std::to_string(vmax);
  man.params["J"] = std::to_string(J);
  man.params["method"] = method;
  man.params["lambda_cm1"] = std::to_string(lambda);
  man.params["direction"] = direction;
  man.params["mapping"] = sum.mapping;
  man.params["drop_floor_cm1"] = std::to_string(kPauliDropFloorCm1);
  man.write(outdir + "/manifest.json");
  std::cout << "L_q = " << sum.size() << "; wrote " << outdir << "/pauli_sum.txt\n";
  return 0;
}

int cmd_qsci(const std::string& model_path, const std::string& schedule_path,
             const std::string& refs_csv, int J, int vmax, bool no_exact,
             bool dump_dists, const std::string& outdir) {
  const auto model = load_model(model_path);
  const auto frame = derive_frame(model);
  if (vmax <= 0) vmax = model.vmax;
  const auto schedule = load_schedule(schedule_path);
  const auto refs = parse_refs(refs_csv, model.n_modes());
  ensure_dir(outdir);

  PipelineResult result;
  try {
    result = run_pipeline(model, frame, vmax, schedule, refs, J, !no_exact);
  } catch (const std::exception&) {
    std::ofstream marker(outdir + "/FAILED");
    marker << "pipeline aborted; partial results not written\n";
    throw;
  }
  write_pipeline_csv(result.rows, outdir + "/results.csv");

  if (dump_dists) {
    ensure_dir(outdir + "/distributions");
    const QubitLayout lay(model.n_modes(), vmax, 0);
    const auto sum = pauli_decompose_factored(model, frame, vmax, 0);
    for (const auto& r : refs) {
      for (int pt = 0; pt < schedule.n_points(); ++pt) {
        const double tau = schedule.mode == Schedule::Mode::VaryNst
                               ? schedule.tau_au
                               : schedule.tau_points_au[pt];
        const int nst =
            schedule.mode == Schedule::Mode::VaryNst ? schedule.nst_points[pt] : schedule.n_st;
        if (nst == 0 || tau == 0) continue;
        const auto psi = trotter_evolve(prepare_basis_state(r, vmax, 0), sum, tau, nst,
                                        schedule.lambda_cm1, schedule.order);
        auto d = exact_distribution(psi, lay);
        if (schedule.n_shot > 0)
          d = sample_shots(d, schedule.n_shot,
                           schedule.seed + 7919 * pt + (&r - refs.data()));
        write_distribution(d, lay, outdir + "/distributions/dist_" + r.vib_label() +
                                       "_point" + std::to_string(pt) + ".txt");
      }
    }
  }

  auto man = base_manifest("qsci", model_path);
  man.params["schedule_file"] = schedule_path;
  man.params["schedule_mode"] =
      schedule.mode == Schedule::Mode::VaryNst ? "vary_nst" : "vary_tau";
  man.params["tau_au"] = std::to_string(schedule.tau_au);
  man.params["n_st"] = std::to_string(schedule.n_st);
  man.params["epsilon"] = std::to_string(schedule.epsilon);
  man.params["lambda_cm1"] = std::to_string(schedule.lambda_cm1);
  man.params["n_shot"] = std::to_string(schedule.n_shot);
  man.params["seed"] = std::to_string(schedule.seed);
  man.params["ordering"] = term_order_name(schedule.order);
  man.params["references"] = refs_csv;
  man.params["J"] = std::to_string(J);
  man.params["vmax"] = std::to_string(vmax);
  man.params["max_offdiag_overlap"] = std::to_string(result.max_offdiag_overlap);
  man.write(outdir + "/manifest.json");
  std::cout << "wrote " << outdir << "/results.csv (" << result.rows.size() << " rows)\n";
  return 0;
}

int cmd_baseline(const std::string& model_path, const std::string& method, int vmax,
                 const std::string& refs_csv, int size, int trials, std::uint64_t seed,
                 int max_size, const std::string& outdir) {
  const auto model = load_model(model_path);
  const auto frame = derive_frame(model);
  if (vmax <= 0) vmax = model.vmax;
  const auto refs = parse_refs(refs_csv, model.n_modes());
  ensure_dir(outdir);
  std::vector<BaselineRow> rows;

  if (method == "pt2") {
    const auto es = pt2_energies(model, frame, vmax, refs);
    for (std::size_t i = 0; i < refs.size(); ++i)
      rows.push_back({"pt2", refs[i].vib_label(), 0, es[i], -1, refs[i].vib_label()});
  } else if (method == "pt1") {
    HamiltonianEvaluator ev(model, frame, vmax, 0);
    const QubitLayout lay(model.n_modes(), vmax, 0);
    for (const auto& r : refs) {
      const auto d = pt1_distribution(model, frame, vmax, r);
      const auto omega = select_basis(d, lay, 1e-4, BasisSet{{r}, "pt1"});
      const auto H = subspace_hamiltonian(omega, ev);
      const auto eig = solve_subspace(H, static_cast<int>(omega.size()));
      const int pick = pick_by_overlap(eig, omega, r);
      rows.push_back({"pt1", r.vib_label(), static_cast<int>(omega.size()),
                      eig.values(pick), -1, r.vib_label()});
    }
  } else if (method == "greedy") {
    for (const auto& r : refs) {
      const auto curve = optimal_greedy(model, frame, vmax, r, max_size);
      for (std::size_t s = 0; s < curve.energies_cm1.size(); ++s)
        rows.push_back({"greedy", r.vib_label(), static_cast<int>(s + 1),
                        curve.energies_cm1[s], -1, r.vib_label()});
    }
  } else if (method == "random") {
    const auto st = random_baseline(model, frame, vmax, refs, size, trials, seed);
    for (std::size_t i = 0; i < refs.size(); ++i)
      rows.push_back({"random", refs[i].vib_label(), size, st.mean_cm1[i], st.std_cm1[i],
                      refs[i].vib_label()});
  } else {
    throw ValidationError("method must be pt2, pt1, greedy or random");
  }

  write_baseline_csv(rows, outdir + "/baseline.csv");
  auto man = base_manifest("baseline", model_path);
  man.params["method"] = method;
  man.params["vmax"] = std::to_string(vmax);
  man.params["references"] = refs_csv;
  man.params["size"] = std::to_string(size);
  man.params["trials"] = std::to_string(trials);
  man.params["seed"] = std::to_string(seed);
  man.params["max_size"] = std::to_string(max_size);
  man.write(outdir + "/manifest.json");
  std::cout << "wrote " << outdir << "/baseline.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rovibrational QSCI pipeline for H2O-class molecules"};
  app.set_config("--config");
  app.require_subcommand(1);

  std::string model_path, outdir = "out", groups = "ALL", direction = "above";
  std::string method = "factored", refs = "000,010,020,100,001", schedule_path, fit_js;
  int vmax = 3, J = 0, n_lowest = 10, scaling_ell = 0, size = 20, trials = 1000;
  int max_size = 20;
  double lambda = 0.0;
  std::uint64_t seed = 1;
  bool no_exact = false, dump_dists = false;

  auto* validate = app.add_subcommand("model-validate", "parse and validate a model file");
  validate->add_option("model", model_path)->required();

  auto* spectrum = app.add_subcommand("spectrum", "dense rovibrational spectra");
  spectrum->add_option("--model", model_path)->required();
  spectrum->add_option("--vmax", vmax);
  spectrum->add_option("--J", J);
  spectrum->add_option("--groups", groups);
  spectrum->add_option("--n-lowest", n_lowest);
  spectrum->add_option("--out", outdir);

  auto* pauli = app.add_subcommand("pauli", "qubit Hamiltonian and term statistics");
  pauli->add_option("--model", model_path)->required();
  pauli->add_option("--vmax", vmax);
  pauli->add_option("--J", J);
  pauli->add_option("--lambda", lambda);
  pauli->add_option("--direction", direction);
  pauli->add_option("--method", method);
  pauli->add_option("--fit-J", fit_js);
  pauli->add_option("--scaling", scaling_ell);
  pauli->add_option("--out", outdir);

  auto* qsci = app.add_subcommand("qsci", "QSCI pipeline over a schedule");
  qsci->add_option("--model", model_path)->required();
  qsci->add_option("--schedule", schedule_path)->required();
  qsci->add_option("--refs", refs);
  qsci->add_option("--J", J);
  qsci->add_option("--vmax", vmax);
  qsci->add_flag("--no-exact", no_exact);
  qsci->add_flag("--dump-distributions", dump_dists);
  qsci->add_option("--out", outdir);

  auto* baseline = app.add_subcommand("baseline", "classical comparison methods");
  baseline->add_option("--model", model_path)->required();
  baseline->add_option("--method", method);
  baseline->add_option("--vmax", vmax);
  baseline->add_option("--refs", refs);
  baseline->add_option("--size", size);
  baseline->add_option("--trials", trials);
  baseline->add_option("--seed", seed);
  baseline->add_option("--max-size", max_size);
  baseline->add_option("--out", outdir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) {
      const auto model = load_model(model_path);
      derive_frame(model);
      std::cout << model.name << ": " << model.n_atoms() << " atoms, " << model.n_modes()
                << " modes, vmax " << model.vmax << " -- valid\n";
      return 0;
    }
    if (spectrum->parsed())
      return cmd_spectrum(model_path, vmax, J, groups, n_lowest, outdir);
    if (pauli->parsed())
      return cmd_pauli(model_path, vmax, J, lambda, direction, method, fit_js, scaling_ell,
                       outdir);
    if (qsci->parsed())
      return cmd_qsci(model_path, schedule_path, refs, J, vmax, no_exact, dump_dists, outdir);
    if (baseline->parsed())
      return cmd_baseline(model_path, method, vmax, refs, size, trials, seed, max_size,
                          outdir);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

// peakbound: quasi-controllability measures, peak bounds and instability
// witnesses for finite matrix families.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "peakbound/desync.hpp"
#include "peakbound/io.hpp"
#include "peakbound/qc.hpp"
#include "peakbound/stability.hpp"
#include "peakbound/witness.hpp"

using namespace peakbound;
using nlohmann::json;

namespace {

struct Common {
  std::string model_path;
  std::string fixture;
  std::string norm;
  int p = -1;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::size_t threads = 1;
  std::size_t cap = 0;
  std::string out;
  bool exploratory = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("model", c.model_path, "model file (JSON, schema v1)");
  cmd->add_option("--fixture", c.fixture, "use a built-in fixture instead of a model file");
  cmd->add_option("--norm", c.norm, "l1, l2 or linf (default: the model's norm, else l1)");
  cmd->add_option("--p", c.p, "product depth p (default N-1)");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--tol", c.tol, "rank tolerance");
  cmd->add_option("--threads", c.threads, "worker threads");
  cmd->add_option("--cap", c.cap, "product-count cap (default PEAKBOUND_CAP or 200000)");
  cmd->add_option("-o,--out", c.out, "write the report here instead of stdout");
  cmd->add_flag("--exploratory", c.exploratory, "allow p < N-1");
}

ModelFile load(const Common& c) {
  if (!c.fixture.empty()) return make_fixture(c.fixture);
  if (c.model_path.empty()) throw InputError("give a model file or --fixture NAME");
  return load_model(c.model_path);
}

QCParams params_for(const Common& c, const ModelFile& model) {
  QCParams q;
  q.norm = c.norm.empty() ? model.norm : parse_norm(c.norm);
  if (c.p >= 0) q.p = static_cast<std::size_t>(c.p);
  q.seed = c.seed;
  q.rank_tol = c.tol;
  q.threads = std::max<std::size_t>(c.threads, 1);
  if (c.cap > 0) q.product_cap = c.cap;
  q.exploratory = c.exploratory;
  return q;
}

json qc_json(const QCReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["p"] = r.p;
  j["norm"] = to_string(r.norm);
  j["exploratory"] = r.exploratory;
  j["sigma_upper"] = tagged(r.sigma_upper, "estimated: smallest radius over evaluated points");
  j["grid_minimum"] = tagged(r.grid_minimum, "estimated: minimum over the deterministic grid");
  if (r.sigma_lower)
    j["sigma_lower"] = tagged(*r.sigma_lower, r.verdict == Verdict::no ? "certified: invariant subspace"
                                                                        : "certified: Lipschitz branch and bound");
  else
    j["sigma_lower"] = nullptr;
  if (r.algebra_dimension) j["algebra_dimension"] = *r.algebra_dimension;
  j["worst_x"] = to_json(r.worst_x);
  if (r.certificate) {
    j["invariant_subspace"] = json::array();
    for (const Vector& v : *r.certificate) j["invariant_subspace"].push_back(to_json(v));
  }
  j["lipschitz"] = tagged(r.lipschitz, "exact: max induced norm over F_p");
  j["evaluations"] = r.evaluations;
  j["cells"] = r.cells;
  j["notes"] = r.notes;
  return j;
}

json certificate_json(const std::optional<StabilityCertificate>& c) {
  if (!c) return nullptr;
  return {{"k", c->k},
          {"q", tagged(c->q, "exact: max induced norm over length-k products")},
          {"mu", tagged(c->mu, "certified: bound on every product norm")},
          {"norm", to_string(c->norm)},
          {"asymptotic", c->asymptotic}};
}

json witness_json(const InstabilityWitness& w) {
  json j;
  j["lambda"] = tagged(w.lambda, "verified by replay");
  j["kappa"] = tagged(w.kappa, "verified by replay");
  j["horizon"] = w.horizon;
  j["block_bound"] = w.block_bound;
  j["seed_word"] = word_json(w.seed.word);
  j["seed_mu"] = tagged(w.seed.mu, "certified: product norm times certified sigma lower bound");
  j["sigma_lower"] = tagged(w.sigma_lower, "certified");
  j["p"] = w.p;
  j["norm"] = to_string(w.norm);
  j["x0"] = to_json(w.trajectory.front());
  json schedule = json::array();
  for (std::size_t i : w.schedule) schedule.push_back(i + 1);
  j["schedule"] = schedule;
  j["checkpoints"] = w.checkpoints;
  json norms = json::array();
  for (const Vector& x : w.trajectory) norms.push_back(vector_norm(x, w.norm));
  j["trajectory_norms"] = norms;
  return j;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

void emit(const Common& c, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw InputError("cannot write '" + c.out + "'");
  f << text;
}

json envelope(const std::string& command, const Common& c, const ModelFile& model, const QCParams& q) {
  json j;
  j["command"] = command;
  j["tool_version"] = kToolVersion;
  j["schema"] = kSchemaVersion;
  j["seed"] = c.seed;
  j["threads"] = q.threads;
  j["inputs"] = {{"model", to_json(model)}, {"norm", to_string(q.norm)}, {"rank_tol", q.rank_tol}};
  if (q.p) j["inputs"]["p"] = *q.p;
  return j;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("cannot parse number '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peakbound: quasi-controllability, peak-effect bounds and instability witnesses"};
  app.require_subcommand(1);

  Common common;
  std::size_t depth = 12;
  std::size_t kmax = 8;
  std::size_t steps = 200;
  std::size_t seeds = 100;
  std::size_t horizon = 100;
  std::size_t seed_depth = 6;
  std::string x0_text;
  std::string taus_text = "0.1,0.01,0.001";
  std::string csv_path;
  std::string fixture_name;
  std::string fixture_dir;
  double fa = 0.5, feps = 0.1, fm = 2.0;

  auto* sigma = app.add_subcommand("sigma", "estimate and certify sigma_p");
  add_common(sigma, common);

  auto* peak = app.add_subcommand("peak", "chi lower and upper bounds with the stability verdict");
  add_common(peak, common);
  peak->add_option("--depth", depth, "product depth for chi_lower");
  peak->add_option("--kmax", kmax, "longest product length tried by the stability certificate");

  auto* desync = app.add_subcommand("desync", "mixture bounds and Monte-Carlo simulation");
  add_common(desync, common);
  desync->add_option("--steps,-T", steps, "simulation length");
  desync->add_option("--seeds", seeds, "number of random schedules");
  desync->add_option("--kmax", kmax, "longest product length tried by the stability certificate");
  desync->add_option("--x0", x0_text, "initial state, comma separated (default all ones)");

  auto* witness = app.add_subcommand("witness", "build a verified exponential-instability witness");
  add_common(witness, common);
  witness->add_option("--horizon", horizon, "verified horizon");
  witness->add_option("--depth", seed_depth, "longest seed product");
  witness->add_option("--x0", x0_text, "initial state, comma separated (default e1)");

  auto* scan = app.add_subcommand("scan", "continuity and robustness scans along the model's perturbation");
  add_common(scan, common);
  scan->add_option("--taus", taus_text, "comma separated perturbation sizes");
  scan->add_option("--horizon", horizon, "witness horizon per row");
  scan->add_option("--depth", seed_depth, "longest seed product");
  scan->add_option("--csv", csv_path, "also write the table as CSV");

  auto* fixtures = app.add_subcommand("fixtures", "emit built-in model files");
  fixtures->add_option("name", fixture_name, "fixture name (omit to list)");
  fixtures->add_option("--a", fa, "E0: diagonal entry a");
  fixtures->add_option("--eps", feps, "E0: off-diagonal entry eps");
  fixtures->add_option("--m", fm, "limexp / unbounded_peaks: index m");
  fixtures->add_option("--dir", fixture_dir, "write every fixture (default parameters) into this directory");
  fixtures->add_option("-o,--out", common.out, "write the model here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    if (fixtures->parsed()) {
      if (!fixture_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(fixture_dir, ec);
        for (const std::string& name : fixture_names()) {
          std::ofstream f(fixture_dir + "/" + name + ".json");
          if (!f) throw InputError("cannot write into '" + fixture_dir + "'");
          f << to_json(make_fixture(name)).dump(2) << "\n";
        }
        return 0;
      }
      if (fixture_name.empty()) {
        for (const std::string& name : fixture_names()) std::cout << name << "\n";
        return 0;
      }
      emit(common, to_json(make_fixture(fixture_name, {{"a", fa}, {"eps", feps}, {"m", fm}})));
      return 0;
    }

    const ModelFile model = load(common);
    const QCParams q = params_for(common, model);

    if (sigma->parsed()) {
      const MatrixFamily family = resolve_family(model);
      const QCReport r = sigma_estimate(family, q);
      json j = envelope("sigma", common, model, q);
      j["result"] = qc_json(r);
      j["wall_time_s"] = elapsed();
      emit(common, j);
      return r.verdict == Verdict::undetermined ? 2 : 0;
    }

    if (peak->parsed()) {
      const MatrixFamily family = resolve_family(model);
      const PeakReport r = peak_report(family, depth, q, kmax);
      json j = envelope("peak", common, model, q);
      json res;
      res["chi_lower"] = tagged(r.chi_lower, "exact: max product norm up to the search depth");
      res["chi_lower_word"] = word_json(r.chi_lower_word);
      res["depth"] = r.depth;
      res["nodes"] = r.nodes;
      res["chi_upper"] = r.chi_upper ? tagged(*r.chi_upper, "certified: " + r.provenance) : json(nullptr);
      if (!r.chi_upper) res["upper_reason"] = r.upper_reason;
      res["stability"] = to_string(r.verdict);
      res["stability_certificate"] = certificate_json(r.certificate);
      if (r.qc) res["qc"] = qc_json(*r.qc);
      if (model.feedback && model.feedback->mode == FeedbackMode::circle) {
        const CircleFeedback cf =
            circle_feedback_family(*model.base, model.feedback->b, model.feedback->c, model.feedback->gamma);
        res["circle"] = {{"max_gain", tagged(cf.max_gain, "estimated: sampled unit circle with refinement")},
                         {"holds", cf.holds},
                         {"margin", cf.margin},
                         {"diagnostic", cf.diagnostic}};
      }
      j["result"] = res;
      j["wall_time_s"] = elapsed();
      emit(common, j);
      return 0;
    }

    if (desync->parsed()) {
      const Matrix& a = require_base(model);
      const std::size_t n = a.rows();
      const MixtureFamily mf = mixtures(a, q.rank_tol);
      const BoundResult sigma_bound = mixture_sigma_bound(a, q.rank_tol);
      const BoundResult peak_bound = desync_peak_bound(a, kmax, q.rank_tol);
      const Vector x0 = x0_text.empty() ? Vector(n, 1.0) : Vector(parse_list(x0_text));
      json j = envelope("desync", common, model, q);
      json res;
      res["irreducible"] = is_irreducible(a);
      res["alpha"] = tagged(mf.alpha, "exact: 1/(2N) times min gain of A - I");
      res["beta"] = tagged(mf.beta, "exact: half the smallest nonzero off-diagonal magnitude");
      res["beta_applicable"] = mf.beta_applicable;
      res["sigma_lower_bound"] = sigma_bound.value ? tagged(*sigma_bound.value, "certified: alpha*beta^(N-1)")
                                                   : json(nullptr);
      if (!sigma_bound.value) res["sigma_bound_reason"] = sigma_bound.reason;
      res["peak_bound"] = peak_bound.value ? tagged(*peak_bound.value, "certified: 1/(alpha*beta^(N-1))")
                                           : json(nullptr);
      if (!peak_bound.value) res["peak_bound_reason"] = peak_bound.reason;
      double worst = 1.0;
      json runs = json::array();
      if (model.schedule) {
        const Simulation sim = simulate({a, resolve_schedule(model, n)}, x0, steps, q.norm);
        runs.push_back({{"schedule", "model"}, {"peak_ratio", sim.peak_ratio}, {"zero_initial", sim.zero_initial}});
        worst = std::max(worst, sim.peak_ratio);
      }
      for (std::size_t s = 0; s < seeds; ++s) {
        const Simulation sim = simulate({a, Schedule::random(n, common.seed + s)}, x0, steps, q.norm);
        runs.push_back({{"schedule", "random"}, {"seed", common.seed + s}, {"peak_ratio", sim.peak_ratio}});
        worst = std::max(worst, sim.peak_ratio);
      }
      res["simulations"] = runs;
      res["max_peak_ratio"] = tagged(worst, "observed: max over simulated schedules");
      j["result"] = res;
      j["wall_time_s"] = elapsed();
      emit(common, j);
      return 0;
    }

    if (witness->parsed()) {
      const MatrixFamily family = resolve_family(model);
      const std::size_t n = family.dim();
      const Vector x0 = x0_text.empty() ? Vector::basis(n, 0) : Vector(parse_list(x0_text));
      const WitnessOutcome w = build_witness(family, q.resolve_p(n), x0, horizon, q, seed_depth);
      json j = envelope("witness", common, model, q);
      json res;
      res["found"] = w.witness.has_value();
      if (w.witness) res["witness"] = witness_json(*w.witness);
      else res["diagnostic"] = w.diagnostic;
      if (w.qc) res["qc"] = qc_json(*w.qc);
      j["result"] = res;
      j["wall_time_s"] = elapsed();
      emit(common, j);
      return w.witness ? 0 : 2;
    }

    if (scan->parsed()) {
      const std::vector<double> taus = parse_list(taus_text);
      const FamilySource source = [&](double tau) { return resolve_family(model, tau); };
      const ContinuityScan cs = continuity_scan(source, taus, q);
      const std::vector<RobustnessRow> rob = robustness_scan(source, taus, q, horizon, seed_depth);
      json j = envelope("scan", common, model, q);
      json rows = json::array();
      std::ostringstream csv;
      csv << "tau,sigma_grid,sigma_upper,sigma_lower,verdict,witness_found,lambda\n";
      auto row_csv = [&](const ContinuityRow& r, const RobustnessRow* w) {
        csv << fmt(r.tau) << "," << fmt(r.sigma_grid) << "," << fmt(r.sigma_upper) << ","
            << (r.sigma_lower ? fmt(*r.sigma_lower) : "") << "," << to_string(r.verdict) << ","
            << (w ? (w->witness_found ? "true" : "false") : "") << ","
            << (w && w->lambda ? fmt(*w->lambda) : "") << "\n";
      };
      row_csv(cs.base, nullptr);
      for (std::size_t i = 0; i < cs.rows.size(); ++i) {
        const ContinuityRow& r = cs.rows[i];
        json row = {{"tau", r.tau},
                    {"sigma_grid", tagged(r.sigma_grid, "estimated: deterministic grid")},
                    {"sigma_upper", tagged(r.sigma_upper, "estimated")},
                    {"sigma_lower", r.sigma_lower ? tagged(*r.sigma_lower, "certified") : json(nullptr)},
                    {"verdict", to_string(r.verdict)},
                    {"gap_to_base", std::abs(r.sigma_grid - cs.base.sigma_grid)},
                    {"witness_found", rob[i].witness_found},
                    {"lambda", rob[i].lambda ? tagged(*rob[i].lambda, "verified by replay") : json(nullptr)}};
        if (!rob[i].witness_found) row["witness_diagnostic"] = rob[i].diagnostic;
        rows.push_back(row);
        row_csv(r, &rob[i]);
      }
      json res;
      res["base"] = {{"sigma_grid", cs.base.sigma_grid}, {"verdict", to_string(cs.base.verdict)}};
      res["base_quasi_controllable"] = cs.base_quasi_controllable;
      res["uniform_lower"] = cs.uniform_lower ? tagged(*cs.uniform_lower, "certified: min over rows") : json(nullptr);
      res["rows"] = rows;
      j["result"] = res;
      j["wall_time_s"] = elapsed();
      if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        if (!f) throw InputError("cannot write '" + csv_path + "'");
        f << csv.str();
      }
      emit(common, j);
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

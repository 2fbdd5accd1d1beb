#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "todakp/darboux.hpp"
#include "todakp/divisor.hpp"
#include "todakp/duality.hpp"
#include "todakp/tau_engine.hpp"
#include "todakp/toda_core.hpp"
#include "todakp/verify.hpp"

using nlohmann::json;
using namespace todakp;

namespace {

// Usage-level problems (bad flags, malformed files): exit code 3.
struct usage_error : std::runtime_error {
  explicit usage_error(const std::string &msg) : std::runtime_error(msg) {}
};

struct GridAxis {
  double lo = 0.0, hi = 0.0;
  int count = 1;
};

struct GridSpec {
  GridAxis x, y, t;
};

GridAxis parse_axis(const std::string &body, const std::string &name) {
  GridAxis ax;
  char expect;
  std::istringstream is(body);
  if (!(is >> ax.lo >> expect) || expect != ':')
    throw usage_error("grid axis '" + name + "' needs lo:hi:count, got '" +
                      body + "'");
  if (!(is >> ax.hi >> expect) || expect != ':')
    throw usage_error("grid axis '" + name + "' needs lo:hi:count, got '" +
                      body + "'");
  if (!(is >> ax.count) || ax.count < 1)
    throw usage_error("grid axis '" + name + "' needs a positive count");
  return ax;
}

// Format: x=lo:hi:count,y=lo:hi:count,t=lo:hi:count (any axis order).
GridSpec parse_grid(const std::string &spec) {
  GridSpec g;
  bool seen_x = false, seen_y = false, seen_t = false;
  std::istringstream is(spec);
  std::string part;
  while (std::getline(is, part, ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0)
      throw usage_error("grid part '" + part + "' is not axis=lo:hi:count");
    std::string name = part.substr(0, eq);
    std::string body = part.substr(eq + 1);
    if (name == "x" && !seen_x) {
      g.x = parse_axis(body, name);
      seen_x = true;
    } else if (name == "y" && !seen_y) {
      g.y = parse_axis(body, name);
      seen_y = true;
    } else if (name == "t" && !seen_t) {
      g.t = parse_axis(body, name);
      seen_t = true;
    } else {
      throw usage_error("grid axis '" + name + "' unknown or repeated");
    }
  }
  if (!seen_x || !seen_y || !seen_t)
    throw usage_error("grid spec must name all of x, y, t");
  return g;
}

double axis_value(const GridAxis &ax, int i) {
  if (ax.count == 1) return ax.lo;
  return ax.lo + (ax.hi - ax.lo) * (double)i / (double)(ax.count - 1);
}

// Row-major with x fastest, then y, then t.
std::vector<GridPoint> grid_points(const GridSpec &g) {
  std::vector<GridPoint> pts;
  pts.reserve((size_t)g.x.count * g.y.count * g.t.count);
  for (int it = 0; it < g.t.count; ++it)
    for (int iy = 0; iy < g.y.count; ++iy)
      for (int ix = 0; ix < g.x.count; ++ix)
        pts.push_back(GridPoint{axis_value(g.x, ix), axis_value(g.y, iy),
                                axis_value(g.t, it)});
  return pts;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Options {
  std::string input_path;
  std::string output_path;
  std::vector<double> kappa, a, t, gamma, delta;
  int k = -1;
  double zeta = 0.0;
  std::string grid;
  std::string route = "jacobi";
  int anchor = 1;
  std::uint64_t seed = 42;
  int trials = 100;
  int n_max = 8;
  double tol_identity = 1e-9;
  double tol_fd = 1e-6;
  std::string precision = "standard";
};

bool flag_given(CLI::App *sub, const std::string &name) {
  CLI::Option *op = sub->get_option_no_throw(name);
  return op != nullptr && op->count() > 0;
}

// Fields of the structured input document; explicit flags win.
void merge_input_document(CLI::App *sub, Options &o) {
  if (o.input_path.empty()) return;
  std::ifstream f(o.input_path);
  if (!f) throw usage_error("cannot open input file: " + o.input_path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error &e) {
    throw usage_error(std::string("malformed input file: ") + e.what());
  }
  try {
    auto pull_list = [&](const char *key, const std::string &flag,
                         std::vector<double> &dst) {
      if (doc.contains(key) && !flag_given(sub, flag))
        dst = doc[key].get<std::vector<double>>();
    };
    pull_list("kappa", "--kappa", o.kappa);
    pull_list("a", "--a", o.a);
    pull_list("t", "--t", o.t);
    pull_list("gamma", "--gamma", o.gamma);
    pull_list("delta", "--delta", o.delta);
    if (doc.contains("k") && !flag_given(sub, "--k")) o.k = doc["k"].get<int>();
    if (doc.contains("grid") && !flag_given(sub, "--grid"))
      o.grid = doc["grid"].get<std::string>();
    if (doc.contains("seed") && !flag_given(sub, "--seed"))
      o.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("trials") && !flag_given(sub, "--trials"))
      o.trials = doc["trials"].get<int>();
    if (doc.contains("n_max") && !flag_given(sub, "--n-max"))
      o.n_max = doc["n_max"].get<int>();
    if (doc.contains("zeta") && !flag_given(sub, "--zeta"))
      o.zeta = doc["zeta"].get<double>();
  } catch (const json::exception &e) {
    throw usage_error(std::string("malformed input file field: ") + e.what());
  }
}

SolitonData data_from(const Options &o) {
  if (o.kappa.empty() || o.a.empty())
    throw usage_error("soliton data needs both --kappa and --a (or an input "
                      "document with those fields)");
  return make_soliton_data(o.kappa, o.a);
}

TimeVector time_from(const Options &o) {
  return o.t.empty() ? TimeVector() : TimeVector(o.t);
}

int require_k(const Options &o, int n) {
  if (o.k < 1 || o.k > n - 1)
    throw usage_error("--k must lie in [1, n-1] = [1, " +
                      std::to_string(n - 1) + "]");
  return o.k;
}

void emit(const Options &o, const std::string &text) {
  if (o.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.output_path);
  if (!f) throw usage_error("cannot open output file: " + o.output_path);
  f << text;
}

json divisor_to_json(const Divisor &d) {
  json collisions = json::array();
  for (const auto &c : d.collisions)
    collisions.push_back({{"kappa_index", c.kappa_index + 1},
                          {"gamma_index", c.gamma_index + 1},
                          {"delta_index", c.delta_index + 1}});
  return json{{"k", d.k},
              {"gamma", d.gammas},
              {"delta", d.deltas},
              {"gamma_ovals", d.gamma_oval},
              {"delta_ovals", d.delta_oval},
              {"generic", d.generic},
              {"collisions", collisions}};
}

int cmd_validate(const Options &o) {
  SolitonData data = data_from(o);
  json out{{"valid", true},
           {"n", data.n()},
           {"kappa", data.kappa},
           {"a", data.a},
           {"span", data.span()},
           {"alpha", alpha_coordinates(data).alpha}};
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_divisor(const Options &o) {
  SolitonData data = data_from(o);
  int k = require_k(o, data.n());
  TimeVector t = time_from(o);
  Divisor d = compatible_divisor(data, k, t);
  json out = divisor_to_json(d);
  out["t"] = t.raw();
  out["vacuum"] = vacuum_divisor(data, t);
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_toda(const Options &o) {
  SolitonData data = data_from(o);
  TimeVector t = time_from(o);
  TodaState st;
  if (o.route == "jacobi") {
    st = jacobi_matrix(data, t);
  } else if (o.route == "bruhat") {
    st = bruhat_flow(jacobi_matrix(data, TimeVector::zero()), t);
  } else {
    double h = 1e-5 * std::max(1.0, t.max_abs());
    st = toda_from_divisor_flow(data, o.anchor, t, h);
  }
  std::vector<double> d, e;
  jacobi_symmetrized(st, d, e);
  std::vector<double> eig = sym_tridiag_eigenvalues(d, e);
  Mat a = jacobi_dense(st);
  Mat p = a;
  std::vector<double> invariants;
  for (int j = 1; j <= data.n(); ++j) {
    p = mat_mul(p, a);
    invariants.push_back(trace(p) / (j + 1));
  }
  json out{{"route", o.route},       {"t", t.raw()},
           {"a", st.a},              {"b", st.b},
           {"eigenvalues", eig},     {"trace_invariants", invariants}};
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_field(const Options &o) {
  SolitonData data = data_from(o);
  int k = require_k(o, data.n());
  if (o.grid.empty()) throw usage_error("field needs --grid");
  GridSpec g = parse_grid(o.grid);
  std::vector<GridPoint> pts = grid_points(g);
  std::vector<double> u = kp_field(data, k, pts);
  std::string out = "x,y,t,u\n";
  for (size_t i = 0; i < pts.size(); ++i)
    out += fmt17(pts[i].x) + "," + fmt17(pts[i].y) + "," + fmt17(pts[i].t3) +
           "," + fmt17(u[i]) + "\n";
  emit(o, out);
  return 0;
}

int cmd_dual(const Options &o) {
  SolitonData data = data_from(o);
  int k = require_k(o, data.n());
  TimeVector t = time_from(o);
  std::string gspec = o.grid.empty() ? "x=-1:1:5,y=-1:1:3,t=-1:1:2" : o.grid;
  std::vector<GridPoint> pts = grid_points(parse_grid(gspec));
  SolitonData dual = dual_data(data);
  DualityResiduals dr = duality_residuals(data, k, t, pts);
  ConstRatio cr = dual_const_ratio(data, k);
  bool pass = dr.field <= o.tol_identity && dr.tau <= o.tol_identity &&
              dr.toda_a <= o.tol_identity && dr.toda_b <= o.tol_identity;
  json out{{"a_hat", dual.a},
           {"dual_order", data.n() - k},
           {"product_law", dual_product_law(data)},
           {"dual_divisor", divisor_to_json(dual_divisor(data, k))},
           {"const_ratio",
            {{"per_j", cr.per_j}, {"expected", cr.expected},
             {"collided", cr.collided}}},
           {"residuals",
            {{"field", dr.field},
             {"tau", dr.tau},
             {"toda_a", dr.toda_a},
             {"toda_b", dr.toda_b},
             {"scale_constant", dr.scale_constant}}},
           {"tolerance", o.tol_identity},
           {"pass", pass}};
  emit(o, out.dump(2) + "\n");
  if (!pass) {
    std::cerr << "verification error: duality residuals exceed "
              << o.tol_identity << "\n";
    return 2;
  }
  return 0;
}

int cmd_invert(const Options &o) {
  if (o.kappa.empty()) throw usage_error("invert needs --kappa");
  if (o.kappa.size() < 2) throw usage_error("invert needs at least two phases");
  int n = (int)o.kappa.size();
  if (o.k < 1 || o.k > n - 1)
    throw usage_error("--k must lie in [1, n-1] = [1, " +
                      std::to_string(n - 1) + "]");
  if ((int)o.gamma.size() != o.k || (int)o.delta.size() != n - o.k - 1)
    throw usage_error("invert needs k gammas and n-k-1 deltas");
  Divisor d;
  d.k = o.k;
  d.gammas = o.gamma;
  d.deltas = o.delta;
  std::sort(d.gammas.begin(), d.gammas.end());
  std::sort(d.deltas.begin(), d.deltas.end());
  // Collision pairs are detected from the phase list, not user-declared.
  double tol = kCollisionTolFactor * (o.kappa.back() - o.kappa.front());
  for (int j = 1; j + 1 < n; ++j) {
    int gi = -1, di = -1;
    for (int i = 0; i < (int)d.gammas.size(); ++i)
      if (std::fabs(d.gammas[i] - o.kappa[j]) < tol) gi = i;
    for (int i = 0; i < (int)d.deltas.size(); ++i)
      if (std::fabs(d.deltas[i] - o.kappa[j]) < tol) di = i;
    if (gi >= 0 && di >= 0) {
      d.collisions.push_back(DivisorCollision{j, gi, di});
      d.generic = false;
    } else if (gi >= 0 || di >= 0) {
      throw input_error("unpaired divisor point at phase " +
                        std::to_string(j + 1));
    }
  }
  SolitonData data = invert_divisor(o.kappa, d);
  json out{{"kappa", data.kappa}, {"a", data.a}, {"k", o.k},
           {"generic", d.generic}};
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_ba(const Options &o) {
  SolitonData data = data_from(o);
  TimeVector t = time_from(o);
  BAVectorPair pair = ba_vectors(data, o.zeta, t);
  json out{{"zeta", pair.zeta},
           {"t", t.raw()},
           {"psi", pair.psi},
           {"psi_sigma", pair.psi_sigma}};
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_verify(const Options &o) {
  VerifyConfig cfg;
  cfg.seed = o.seed;
  cfg.trials = o.trials;
  cfg.n_max = o.n_max;
  VerificationReport rep = verify_suite(cfg);
  emit(o, report_to_json(rep));
  if (!rep.all_pass()) {
    for (const auto &c : rep.checks)
      if (!c.pass)
        std::cerr << "verification error: check '" << c.name
                  << "' residual " << c.max_residual << " > tolerance "
                  << c.tolerance << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Totally positive line-soliton data, spectral divisors on the "
               "degenerate two-sheet curve, and the finite Toda hierarchy"};
  app.require_subcommand(1);
  Options o;
  if (const char *env = std::getenv("TODAKP_PRECISION")) o.precision = env;

  auto add_common = [&](CLI::App *cmd, bool with_data) {
    cmd->add_option("--input", o.input_path,
                    "structured input document {kappa, a, k, t, grid, seed}");
    cmd->add_option("--output", o.output_path, "write output to this path");
    cmd->add_option("--precision", o.precision,
                    "precision profile (standard | extended-test)")
        ->check(CLI::IsMember({"standard", "extended-test"}));
    if (with_data) {
      cmd->add_option("--kappa", o.kappa, "phases, strictly increasing")
          ->delimiter(',');
      cmd->add_option("--a", o.a, "positive weights")->delimiter(',');
      cmd->add_option("--t", o.t, "hierarchy times t1,t2,...")->delimiter(',');
    }
  };

  CLI::App *c_validate =
      app.add_subcommand("validate", "validate data, report coordinates");
  add_common(c_validate, true);

  CLI::App *c_divisor =
      app.add_subcommand("divisor", "spectral divisor of order k at time t");
  add_common(c_divisor, true);
  c_divisor->add_option("--k", o.k, "dressing order");

  CLI::App *c_toda = app.add_subcommand("toda", "Jacobi state at time t");
  add_common(c_toda, true);
  c_toda->add_option("--route", o.route, "jacobi | bruhat | divisor-flow")
      ->check(CLI::IsMember({"jacobi", "bruhat", "divisor-flow"}));
  c_toda->add_option("--anchor", o.anchor,
                     "phase index anchoring the divisor-flow route");

  CLI::App *c_field =
      app.add_subcommand("field", "KP field u on a grid, CSV output");
  add_common(c_field, true);
  c_field->add_option("--k", o.k, "dressing order");
  c_field->add_option("--grid", o.grid, "x=lo:hi:n,y=lo:hi:n,t=lo:hi:n");

  CLI::App *c_dual =
      app.add_subcommand("dual", "space-time-inversion partner and residuals");
  add_common(c_dual, true);
  c_dual->add_option("--k", o.k, "dressing order");
  c_dual->add_option("--grid", o.grid, "grid for the field residual");
  c_dual->add_option("--tol-identity", o.tol_identity,
                     "identity tolerance for the pass flag");

  CLI::App *c_invert =
      app.add_subcommand("invert", "weights from a divisor (inverse problem)");
  add_common(c_invert, false);
  c_invert->add_option("--kappa", o.kappa, "phases")->delimiter(',');
  c_invert->add_option("--k", o.k, "dressing order");
  c_invert->add_option("--gamma", o.gamma, "plus-sheet points")->delimiter(',');
  c_invert->add_option("--delta", o.delta, "minus-sheet points")
      ->delimiter(',');

  CLI::App *c_ba =
      app.add_subcommand("ba", "Baker-Akhiezer vector pair at zeta");
  add_common(c_ba, true);
  c_ba->add_option("--zeta", o.zeta, "spectral parameter");

  CLI::App *c_verify =
      app.add_subcommand("verify", "run the seeded verification suite");
  add_common(c_verify, false);
  c_verify->add_option("--seed", o.seed, "instance stream seed");
  c_verify->add_option("--trials", o.trials, "number of random instances");
  c_verify->add_option("--n-max", o.n_max, "largest phase count drawn");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  CLI::App *sub = app.get_subcommands().front();
  try {
    merge_input_document(sub, o);
    if (sub == c_validate) return cmd_validate(o);
    if (sub == c_divisor) return cmd_divisor(o);
    if (sub == c_toda) return cmd_toda(o);
    if (sub == c_field) return cmd_field(o);
    if (sub == c_dual) return cmd_dual(o);
    if (sub == c_invert) return cmd_invert(o);
    if (sub == c_ba) return cmd_ba(o);
    if (sub == c_verify) return cmd_verify(o);
    throw usage_error("unknown subcommand");
  } catch (const usage_error &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 3;
  } catch (const input_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const check_error &e) {
    std::cerr << "verification error: " << e.what() << "\n";
    return 2;
  }
}

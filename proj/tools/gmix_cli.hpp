#pragma once
// Command-line front end. run_cli parses arguments, runs one command and writes a JSON
// object or CSV rows. Exit codes: 0 success or "holds", 2 "fails", 3 "inconclusive",
// 1 usage error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmix/gmix.hpp"

namespace gmix::cli {

struct ResultRow {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 1;
};

struct Output {
  std::vector<ResultRow> results;
  std::optional<VerificationReport> report;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Argument parsing helpers

inline double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& part : split(s, ',')) v.push_back(parse_number(part));
  if (v.empty()) throw UsageError("empty list");
  return v;
}

struct FamilyArgs {
  std::string name = "exp-power";
  double p = 1.0;
  double sigma = 1.0;
  std::string scales = "0.5,2";
  std::string probs = "0.5,0.5";

  void add_to(CLI::App* app) {
    app->add_option("--family", name, "gaussian | exp-power | stable | discrete")->capture_default_str();
    app->add_option("--p", p, "exponent of exp-power or stable families")->capture_default_str();
    app->add_option("--sigma", sigma, "scale of the gaussian family")->capture_default_str();
    app->add_option("--scales", scales, "discrete family scales")->capture_default_str();
    app->add_option("--probs", probs, "discrete family probabilities")->capture_default_str();
  }

  MixtureFamily family() const {
    if (name == "gaussian") return MixtureFamily::gaussian(sigma);
    if (name == "exp-power") return MixtureFamily::exponential_power(p);
    if (name == "stable") return MixtureFamily::symmetric_stable(p);
    if (name == "discrete") return MixtureFamily::discrete(parse_list(scales), parse_list(probs));
    throw UsageError("unknown family '" + name + "'");
  }
};

/// Bodies: cube:c, box:c1,c2,..., ball:r, rotated-square:c, whole,
/// slabs:v1,v2,.../c;w1,w2,.../d
inline SymmetricConvexBody parse_body(const std::string& spec, std::size_t n) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "whole") return SymmetricConvexBody::whole_space(n);
  if (kind == "cube") return SymmetricConvexBody::cube(n, parse_number(arg));
  if (kind == "ball") return SymmetricConvexBody::ball(n, parse_number(arg));
  if (kind == "box") {
    const auto w = parse_list(arg);
    if (w.size() != n) throw UsageError("box: expected " + std::to_string(n) + " half-widths");
    return SymmetricConvexBody::box(w);
  }
  if (kind == "rotated-square") {
    if (n != 2) throw UsageError("rotated-square needs --n 2");
    const double s = 1.0 / std::sqrt(2.0), c = parse_number(arg);
    return SymmetricConvexBody::slabs(2, {{{s, s}, c}, {{s, -s}, c}});
  }
  if (kind == "slabs") {
    std::vector<Slab> slabs;
    for (const auto& item : split(arg, ';')) {
      const auto parts = split(item, '/');
      if (parts.size() != 2) throw UsageError("slab must read v1,...,vn/c");
      auto v = parse_list(parts[0]);
      if (v.size() != n) throw UsageError("slab normal must have " + std::to_string(n) + " entries");
      slabs.push_back({std::move(v), parse_number(parts[1])});
    }
    return SymmetricConvexBody::slabs(n, std::move(slabs));
  }
  throw UsageError("unknown body '" + spec + "'");
}

/// Unit vector from a list; "e1" and "diag" are shorthands in dimension n.
inline WeightVector parse_direction(const std::string& s, std::size_t n) {
  if (s == "e1") return HyperplaneSpec::coordinate(n).normal;
  if (s == "diag") return HyperplaneSpec::diagonal(n).normal;
  const auto v = parse_list(s);
  if (n != 0 && v.size() != n) throw UsageError("vector '" + s + "' must have " + std::to_string(n) + " entries");
  return WeightVector(v).normalized();
}

// ---------------------------------------------------------------------------
// Output

inline void add_estimate(Output& out, const std::string& name, const Estimate& e) {
  out.results.push_back({name, e.value, e.std_error, e.n_samples});
}

inline void add_exact(Output& out, const std::string& name, double v) { out.results.push_back({name, v, 0.0, 1}); }

inline Output from_report(VerificationReport r) {
  Output out;
  for (const auto& [name, e] : r.estimates) add_estimate(out, name, e);
  for (const auto& row : r.rows)
    out.results.push_back({"margin: " + row.label, row.margin, row.std_error, r.n_samples ? r.n_samples : 1});
  out.report = std::move(r);
  return out;
}

inline nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string csv_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// ---------------------------------------------------------------------------

struct Globals {
  std::uint64_t seed = 0;
  std::size_t samples = 1000000;
  std::string format = "json";
  std::string out_path;
  double hold_sigma = kHoldSigma;
  double fail_sigma = kFailSigma;
};

inline int exit_code(const Output& out) {
  if (!out.report) return 0;
  switch (out.report->verdict) {
    case Verdict::holds: return 0;
    case Verdict::fails: return 2;
    case Verdict::inconclusive: return 3;
  }
  return 1;
}

inline void write(std::ostream& os, const std::string& command,
                  const std::vector<std::pair<std::string, std::string>>& params, const Output& out,
                  const Globals& g) {
  if (g.format == "csv") {
    os << "command,name,value,stderr,n,seed\n";
    for (const auto& r : out.results)
      os << csv_field(command) << ',' << csv_field(r.name) << ',' << csv_number(r.value) << ','
         << csv_number(r.std_error) << ',' << r.n << ',' << g.seed << '\n';
    if (out.report)
      os << csv_field(command) << ",verdict:" << to_string(out.report->verdict) << ','
         << csv_number(out.report->margin) << ",0,1," << g.seed << '\n';
    return;
  }
  nlohmann::ordered_json j;
  j["command"] = command;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) j["params"][k] = v;
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : out.results)
    j["results"].push_back({{"name", r.name}, {"value", number(r.value)}, {"stderr", number(r.std_error)}, {"n", r.n}});
  if (out.report) {
    j["verdict"] = to_string(out.report->verdict);
    j["margin"] = number(out.report->margin);
    if (!out.report->notes.empty()) j["notes"] = out.report->notes;
  }
  j["seed"] = g.seed;
  os << j.dump(2) << '\n';
}

/// Runs the command line; output goes to `out` (or --out), diagnostics to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian mixtures: constants, estimates and inequality checks", "gmix"};
  app.require_subcommand(1);
  Globals g;
  const auto add_globals = [&g](CLI::App* sub) {
    sub->add_option("--seed", g.seed, "64-bit seed")->capture_default_str();
    sub->add_option("--samples", g.samples, "Monte Carlo sample size")->capture_default_str();
    sub->add_option("--format", g.format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    sub->add_option("--out", g.out_path, "write output to this file");
    sub->add_option("--hold-sigma", g.hold_sigma, "margin (in stderr) above which a claim holds")->capture_default_str();
    sub->add_option("--fail-sigma", g.fail_sigma, "margin (in stderr) below which a claim fails")->capture_default_str();
  };

  std::function<Output()> action;
  const auto escalate = [&g](const std::function<VerificationReport(std::size_t)>& run, std::size_t n) {
    return with_escalation(
        [&](std::size_t m) {
          auto r = run(m);
          r.finalize(g.hold_sigma, g.fail_sigma);
          return r;
        },
        n);
  };
  CLI::App* chosen = nullptr;
  const auto command = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* sub = parent->add_subcommand(name, help);
    add_globals(sub);
    return sub;
  };
  const auto stream = [&g]() { return RandomStream(g.seed); };

  // constants
  FamilyArgs cf;
  double c_moment = 3.0;
  auto* constants = command(&app, "constants", "gamma_p, c_p, moments and Khintchine constants");
  cf.add_to(constants);
  constants->add_option("--moment", c_moment, "moment order r")->capture_default_str();
  constants->callback([&] {
    chosen = constants;
    action = [&] {
      Output o;
      const auto f = cf.family();
      add_exact(o, "gamma_r", gaussian_norm(c_moment));
      if (f.is<ExponentialPower>()) add_exact(o, "c_p", exp_power_constant(cf.p));
      check_moment_order(f, c_moment);
      add_exact(o, "E|X|^r", abs_moment(f, c_moment));
      add_exact(o, "||X||_r", abs_norm(f, c_moment));
      if (f.moment_limit() > 2.0) {
        const auto k = khintchine_constants(f, c_moment);
        add_exact(o, "A_r", k.lower);
        add_exact(o, "B_r", k.upper);
      }
      return o;
    };
  });

  // moment
  FamilyArgs mf;
  std::string m_a = "1,1";
  double m_order = 1.0;
  std::string m_method = "reduced";
  auto* moment = command(&app, "moment", "||sum a_i X_i||_r");
  mf.add_to(moment);
  moment->add_option("--a", m_a, "coefficients (normalized)")->capture_default_str();
  moment->add_option("--moment", m_order, "moment order r")->capture_default_str();
  moment->add_option("--method", m_method, "reduced | direct | quadrature")
      ->check(CLI::IsMember({"reduced", "direct", "quadrature"}))
      ->capture_default_str();
  moment->callback([&] {
    chosen = moment;
    action = [&] {
      const MomentMethod method = m_method == "reduced"  ? MomentMethod::reduced_mc
                                  : m_method == "direct" ? MomentMethod::direct_mc
                                                         : MomentMethod::quadrature;
      Output o;
      add_estimate(o, "norm", weighted_moment({mf.family(), parse_direction(m_a, 0), m_order, method}, g.samples,
                                              stream()));
      return o;
    };
  });

  // entropy
  FamilyArgs ef;
  std::string e_a = "1";
  double e_alpha = 1.0;
  std::size_t e_pool = std::size_t{1} << 15;
  auto* entropy_cmd = command(&app, "entropy", "Shannon (alpha = 1) or Renyi entropy of sum a_i X_i");
  ef.add_to(entropy_cmd);
  entropy_cmd->add_option("--a", e_a, "coefficients")->capture_default_str();
  entropy_cmd->add_option("--alpha", e_alpha, "Renyi order, 1 for Shannon")->capture_default_str();
  entropy_cmd->add_option("--pool", e_pool, "mixing pool size")->capture_default_str();
  entropy_cmd->callback([&] {
    chosen = entropy_cmd;
    action = [&] {
      const auto a = parse_list(e_a);
      EntropySpec spec{MixtureSum::iid(ef.family(), WeightVector(a))};
      spec.alpha = e_alpha;
      spec.pool_size = e_pool;
      spec.n_samples = g.samples;
      const auto e = entropy(spec, stream());
      Output o;
      add_estimate(o, e_alpha == 1.0 ? "shannon" : "renyi", e.estimate());
      add_exact(o, "pool_bias", e.pool_bias);
      return o;
    };
  });

  // section-volume / projection-volume / mean-width
  std::string s_q = "1", s_a = "diag";
  std::size_t s_n = 3;
  auto* section = command(&app, "section-volume", "|B_q^n cap a^perp| for q in (0, 2)");
  section->add_option("--q", s_q, "q in (0, 2)")->capture_default_str();
  section->add_option("--n", s_n, "dimension")->capture_default_str();
  section->add_option("--a", s_a, "normal: list, e1 or diag")->capture_default_str();
  section->callback([&] {
    chosen = section;
    action = [&] {
      Output o;
      add_estimate(o, "section_volume",
                   section_volume(parse_number(s_q), HyperplaneSpec(parse_direction(s_a, s_n)), g.samples, stream()));
      return o;
    };
  });

  std::string p_q = "4", p_a = "diag";
  std::size_t p_n = 3;
  auto* projection = command(&app, "projection-volume", "|Proj_{a^perp} B_q^n| for q in (2, inf]");
  projection->add_option("--q", p_q, "q in (2, inf]")->capture_default_str();
  projection->add_option("--n", p_n, "dimension")->capture_default_str();
  projection->add_option("--a", p_a, "normal: list, e1 or diag")->capture_default_str();
  projection->callback([&] {
    chosen = projection;
    action = [&] {
      Output o;
      const double q = parse_number(p_q);
      const HyperplaneSpec a(parse_direction(p_a, p_n));
      if (std::isinf(q))
        add_exact(o, "projection_volume", cube_projection_volume(a));
      else
        add_estimate(o, "projection_volume", projection_volume(q, a, g.samples, stream()));
      return o;
    };
  });

  std::string w_q = "inf", w_a = "e1";
  std::size_t w_n = 3;
  auto* width = command(&app, "mean-width", "mean width of Proj_{a^perp} B_{q*}^n");
  width->add_option("--qstar", w_q, "q* in [2, inf]")->capture_default_str();
  width->add_option("--n", w_n, "dimension")->capture_default_str();
  width->add_option("--a", w_a, "normal: list, e1 or diag")->capture_default_str();
  width->callback([&] {
    chosen = width;
    action = [&] {
      Output o;
      const double q = parse_number(w_q);
      const HyperplaneSpec a(parse_direction(w_a, w_n));
      add_estimate(o, "mean_width", mean_width_projection(q, a, g.samples, stream()));
      if (a.dim() == 3) add_exact(o, "mean_width_quadrature", mean_width_projection_circle(q, a));
      return o;
    };
  });

  // ball-sample
  double b_q = 2.0, b_r = 2.0;
  std::size_t b_n = 3;
  auto* ball = command(&app, "ball-sample", "marginal moments of the uniform law on B_q^n");
  ball->add_option("--q", b_q, "q > 0")->capture_default_str();
  ball->add_option("--n", b_n, "dimension")->capture_default_str();
  ball->add_option("--moment", b_r, "moment order r > -1")->capture_default_str();
  ball->callback([&] {
    chosen = ball;
    action = [&] {
      const auto xs = ball_uniform_sample(BallUniformSpec{b_q, b_n}, g.samples, stream());
      std::vector<double> first(b_n, 0.0);
      first[0] = 1.0;
      const auto values = projection_power_values(xs, WeightVector(first), b_r);
      Output o;
      add_estimate(o, "E|X_1|^r sample", to_estimate(weighted_mean(values), stream()));
      add_exact(o, "E|X_1|^r formula", std::pow(ball_marginal_norm(b_q, b_n, b_r), b_r));
      return o;
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "inequality checks");
  verify->require_subcommand(1);

  FamilyArgs vf;
  std::string v_fn = "moment", v_a = "diag", v_b = "e1";
  double v_order = 1.0, v_lambda = 1.0;
  std::size_t v_n = 3, v_pool = std::size_t{1} << 15;
  auto* schur = command(verify, "schur", "Schur comparison of a functional at a and b");
  vf.add_to(schur);
  schur->add_option("--functional", v_fn, "moment | shannon | renyi | section | projection | laplace")
      ->check(CLI::IsMember({"moment", "shannon", "renyi", "section", "projection", "laplace"}))
      ->capture_default_str();
  schur->add_option("--order", v_order, "moment order, Renyi alpha, or q")->capture_default_str();
  schur->add_option("--lambda", v_lambda, "Laplace functional parameter")->capture_default_str();
  schur->add_option("--n", v_n, "dimension for e1/diag shorthands")->capture_default_str();
  schur->add_option("--a", v_a, "the more balanced vector")->capture_default_str();
  schur->add_option("--b", v_b, "the majorizing vector")->capture_default_str();
  schur->add_option("--pool", v_pool, "entropy pool size")->capture_default_str();
  schur->callback([&] {
    chosen = schur;
    action = [&] {
      const SchurFunctional fn = v_fn == "moment"       ? SchurFunctional::moment(vf.family(), v_order)
                                 : v_fn == "shannon"    ? SchurFunctional::shannon(vf.family())
                                 : v_fn == "renyi"      ? SchurFunctional::renyi(vf.family(), v_order)
                                 : v_fn == "section"    ? SchurFunctional::section_volume(v_order)
                                 : v_fn == "projection" ? SchurFunctional::projection_volume(v_order)
                                                        : SchurFunctional::laplace_functional(v_order, v_lambda);
      const auto a = parse_direction(v_a, v_n), b = parse_direction(v_b, v_n);
      return from_report(escalate(
          [&](std::size_t n) { return schur_compare(fn, a, b, Budget{n, v_pool}, stream()); }, g.samples));
    };
  });

  FamilyArgs bf;
  std::string bi_body = "rotated-square:1", bi_grid, bi_dil;
  std::size_t bi_n = 2, bi_points = 5;
  double bi_range = 1.0;
  auto* binq = command(verify, "b-inequality", "log-concavity of t -> mu(diag(e^t) K)");
  bf.add_to(binq);
  binq->add_option("--body", bi_body, "cube:c | box:.. | ball:r | rotated-square:c | slabs:v/c;..")
      ->capture_default_str();
  binq->add_option("--n", bi_n, "dimension")->capture_default_str();
  binq->add_option("--grid", bi_grid, "explicit grid t1,..,tn;t1,..,tn;...");
  binq->add_option("--grid-points", bi_points, "points per axis on [-range, range]")->capture_default_str();
  binq->add_option("--grid-range", bi_range, "half-width of the per-axis grid")->capture_default_str();
  binq->add_option("--dilations", bi_dil, "s values for the 1/n-concavity of mu(sK)");
  binq->callback([&] {
    chosen = binq;
    action = [&] {
      BInequalityOptions opts;
      if (!bi_grid.empty()) {
        for (const auto& t : split(bi_grid, ';')) opts.t_grid.push_back(parse_list(t));
      } else {
        if (bi_points < 2) throw UsageError("--grid-points must be at least 2");
        std::vector<double> axis(bi_points);
        for (std::size_t i = 0; i < bi_points; ++i)
          axis[i] = -bi_range + 2.0 * bi_range * static_cast<double>(i) / static_cast<double>(bi_points - 1);
        std::vector<std::size_t> idx(bi_n, 0);
        while (true) {
          std::vector<double> t(bi_n);
          for (std::size_t j = 0; j < bi_n; ++j) t[j] = axis[idx[j]];
          opts.t_grid.push_back(std::move(t));
          std::size_t j = 0;
          while (j < bi_n && ++idx[j] == bi_points) idx[j++] = 0;
          if (j == bi_n) break;
        }
      }
      if (!bi_dil.empty()) opts.dilations = parse_list(bi_dil);
      const auto body = parse_body(bi_body, bi_n);
      const auto mu = ProductMixtureMeasure::iid(bf.family(), bi_n);
      return from_report(escalate(
          [&](std::size_t n) {
            auto o = opts;
            o.n_samples = n;
            return b_inequality_report(mu, body, o, stream());
          },
          g.samples));
    };
  });

  FamilyArgs rf;
  std::string c_law = "product", c_k = "slabs:1,-1/0.5", c_l = "slabs:1,1/0.5", c_atoms = "1,0:1;0,1:1";
  double c_stable_p = 1.5;
  std::size_t c_n = 2;
  auto* corr = command(verify, "correlation", "mu(K cap L) >= mu(K) mu(L)");
  rf.add_to(corr);
  corr->add_option("--law", c_law, "product | spectral")->check(CLI::IsMember({"product", "spectral"}))
      ->capture_default_str();
  corr->add_option("--stable-p", c_stable_p, "stable index of the spectral law")->capture_default_str();
  corr->add_option("--atoms", c_atoms, "spectral atoms u1,..,un:mass;...")->capture_default_str();
  corr->add_option("--body-k", c_k, "first body")->capture_default_str();
  corr->add_option("--body-l", c_l, "second body")->capture_default_str();
  corr->add_option("--n", c_n, "dimension")->capture_default_str();
  corr->callback([&] {
    chosen = corr;
    action = [&] {
      CorrelationLaw law = ProductMixtureMeasure::iid(MixtureFamily::gaussian(), c_n);
      if (c_law == "product") {
        law = ProductMixtureMeasure::iid(rf.family(), c_n);
      } else {
        SpectralStableVector x{c_stable_p, {}};
        for (const auto& item : split(c_atoms, ';')) {
          const auto parts = split(item, ':');
          if (parts.size() != 2) throw UsageError("atom must read u1,...,un:mass");
          const auto u = parse_direction(parts[0], c_n).coords();
          x.atoms.push_back({std::vector<double>(u.begin(), u.end()), parse_number(parts[1])});
        }
        law = x;
      }
      const auto k = parse_body(c_k, c_n), l = parse_body(c_l, c_n);
      return from_report(
          escalate([&](std::size_t n) { return correlation_report(law, k, l, n, stream()); }, g.samples));
    };
  });

  double st_p = 4.0, st_delta = 0.01;
  auto* strip = command(verify, "strip-counterexample", "diagonal strips under mu_p^2 by quadrature");
  strip->add_option("--p", st_p, "p >= 2")->capture_default_str();
  strip->add_option("--delta", st_delta, "strip half-width in (0, 0.05]")->capture_default_str();
  strip->callback([&] {
    chosen = strip;
    action = [&] { return from_report(strip_expansion_report(st_p, st_delta)); };
  });

  std::string sb_body = "cube:0.9", sb_grid = "0.2,0.4,0.6,0.8,1";
  std::size_t sb_n = 3;
  std::optional<double> sb_r;
  auto* small = command(verify, "small-ball", "mu_1^n(tK) <= t^{r/(2 sqrt 6)} mu_1^n(K)");
  small->add_option("--body", sb_body, "body with mu_1^n(K) <= 1/2")->capture_default_str();
  small->add_option("--n", sb_n, "dimension")->capture_default_str();
  small->add_option("--grid", sb_grid, "t values in (0, 1]")->capture_default_str();
  small->add_option("--inradius", sb_r, "lower bound for r(K) (default: certified inradius)");
  small->callback([&] {
    chosen = small;
    action = [&] {
      SmallBallOptions opts;
      opts.t_grid = parse_list(sb_grid);
      opts.inradius = sb_r;
      const auto body = parse_body(sb_body, sb_n);
      return from_report(escalate(
          [&](std::size_t n) {
            auto o = opts;
            o.n_samples = n;
            return small_ball_report(body, o, stream());
          },
          g.samples));
    };
  });

  std::string sp_k = "ball:0.8", sp_l = "slabs:1,0/0.3";
  std::size_t sp_n = 2;
  auto* sphere = command(verify, "sphere-correlation", "correlation on the upper hemisphere via the gnomonic chart");
  sphere->add_option("--body-k", sp_k, "gnomonic image of the first set")->capture_default_str();
  sphere->add_option("--body-l", sp_l, "gnomonic image of the second set")->capture_default_str();
  sphere->add_option("--n", sp_n, "dimension of the chart (sphere S^n)")->capture_default_str();
  sphere->callback([&] {
    chosen = sphere;
    action = [&] {
      const auto k = parse_body(sp_k, sp_n), l = parse_body(sp_l, sp_n);
      return from_report(
          escalate([&](std::size_t n) { return spherical_correlation_report(k, l, n, stream()); }, g.samples));
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  if (!action || !chosen) {
    err << "error: no command given\n";
    return 1;
  }

  std::string name = chosen->get_name();
  if (chosen->get_parent() && chosen->get_parent() != &app) name = chosen->get_parent()->get_name() + " " + name;
  std::vector<std::pair<std::string, std::string>> params;
  for (const CLI::Option* opt : chosen->get_options()) {
    const std::string key = opt->get_name(false, true);
    if (key.empty() || key == "--help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    params.emplace_back(key.substr(key.find_first_not_of('-')), value);
  }

  Output result;
  try {
    if (!(g.hold_sigma > 0.0) || !(g.fail_sigma >= g.hold_sigma))
      throw UsageError("--fail-sigma must be at least --hold-sigma > 0");
    result = action();
    if (result.report) result.report->finalize(g.hold_sigma, g.fail_sigma);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (g.out_path.empty()) {
    write(out, name, params, result, g);
  } else {
    std::ofstream file(g.out_path);
    if (!file) {
      err << "error: cannot open " << g.out_path << '\n';
      return 1;
    }
    write(file, name, params, result, g);
  }
  return exit_code(result);
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace gmix::cli

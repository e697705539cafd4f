#include "geolab/integrals.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace geolab {

namespace {

const cplx kNegI(0.0, -1.0);

CMat matpow(const CMat& m, int k) {
  CMat acc = CMat::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) acc = acc * m;
  return acc;
}

CMat apply_proj(const IntegralSpec& s, const CMat& b) {
  if (!s.proj) return b;
  if (s.proj->ambient_dim() != b.rows())
    throw std::invalid_argument("eval_integral: projection dimension mismatch");
  return project(*s.proj, b);
}

// value of the unsquared observable on one matrix slot
double eval_raw(const IntegralSpec& s, const CMat& b) {
  CMat m = apply_proj(s, b);
  cplx tr = matpow(m, s.power).trace();
  cplx val = s.imag_multiplier ? kNegI * tr : tr;
  if (std::abs(val.imag()) > 1e-10 * std::max(1.0, std::abs(val.real())))
    throw std::runtime_error("eval_integral: non-real value, mis-specified power/multiplier");
  return val.real();
}

// unsquared gradient on one slot; the result lies in the ambient span
CMat grad_raw(const IntegralSpec& s, const CMat& b) {
  const auto n = b.rows();
  CMat m = apply_proj(s, b);
  CMat s_mat = matpow(m, s.power - 1);
  if (s.imag_multiplier) s_mat = kNegI * s_mat;
  CMat g = -2.0 * static_cast<double>(s.power) * (s.proj ? project(*s.proj, s_mat) : s_mat);
  g -= (g.trace() / static_cast<double>(n)) * CMat::Identity(n, n);
  return g;
}

std::string factor_name(Factor f) {
  switch (f) {
    case Factor::left: return "left";
    case Factor::right: return "right";
    default: return "both";
  }
}

Factor factor_from_name(const std::string& s) {
  if (s == "left") return Factor::left;
  if (s == "right") return Factor::right;
  if (s == "both") return Factor::both_as_given;
  throw std::invalid_argument("unknown factor label: " + s);
}

std::string ambient_kind_name(AlgebraKind k) {
  switch (k) {
    case AlgebraKind::special_unitary: return "su";
    case AlgebraKind::orthogonal: return "so";
    default: return "sp";
  }
}

AmbientAlgebra ambient_from(const std::string& kind, int n) {
  if (kind == "su") return ambient_su(n);
  if (kind == "so") return ambient_so(n);
  // quaternionic rank 2, embedded in 4x4 complex matrices; accept either size
  if (kind == "sp" && (n == 2 || n == 4)) return ambient_sp2();
  throw std::invalid_argument("unsupported ambient: " + kind + "(" + std::to_string(n) + ")");
}

// distributes [0, n) across the thread budget; fn must be independent per index
template <class Fn>
void for_samples(int n, Fn&& fn) {
  int workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

// linear tail observables h_j for j = 1..N-1 (optionally squared), then
// quadratic ones for j = 2..N with the full algebra at the top
std::vector<IntegralSpec> u_tail_chain(int N, bool square_linear) {
  std::vector<IntegralSpec> specs;
  for (int j = 1; j < N; ++j) {
    IntegralSpec s;
    s.proj = subalgebra_by_name("su" + std::to_string(N) + ".u" + std::to_string(j) + "_tail");
    s.power = 1;
    s.imag_multiplier = true;
    s.square = square_linear;
    specs.push_back(std::move(s));
  }
  for (int j = 2; j <= N; ++j) {
    IntegralSpec s;
    if (j < N)
      s.proj = subalgebra_by_name("su" + std::to_string(N) + ".u" + std::to_string(j) + "_tail");
    s.power = 2;
    specs.push_back(std::move(s));
  }
  return specs;
}

std::pair<std::string, int> parse_label(const std::string& label) {
  auto open = label.find('(');
  if (open == std::string::npos) return {label, -1};
  if (label.back() != ')')
    throw std::invalid_argument("malformed family label: " + label);
  std::string base = label.substr(0, open);
  std::string arg = label.substr(open + 1, label.size() - open - 2);
  size_t used = 0;
  int n = std::stoi(arg, &used);
  if (used != arg.size())
    throw std::invalid_argument("malformed family label: " + label);
  return {base, n};
}

}  // namespace

void validate_spec(const IntegralSpec& s) {
  if (s.power < 1) throw std::invalid_argument("integral spec: power must be >= 1");
  const bool odd = (s.power % 2) != 0;
  if (odd != s.imag_multiplier)
    throw std::invalid_argument(
        "integral spec: real-valuedness requires the imaginary multiplier exactly for odd powers");
}

double eval_integral(const IntegralSpec& s, const CMat& b) {
  validate_spec(s);
  double v = eval_raw(s, b);
  return s.square ? v * v : v;
}

double eval_integral(const IntegralSpec& s, const MomentPair& mp) {
  validate_spec(s);
  double v = 0;
  switch (s.factor) {
    case Factor::left: v = eval_raw(s, mp.left); break;
    case Factor::right: v = eval_raw(s, mp.right); break;
    case Factor::both_as_given: v = eval_raw(s, mp.left) + eval_raw(s, mp.right); break;
  }
  return s.square ? v * v : v;
}

MomentPair gradient(const IntegralSpec& s, const MomentPair& mp) {
  validate_spec(s);
  MomentPair g{CMat::Zero(mp.left.rows(), mp.left.cols()),
               CMat::Zero(mp.right.rows(), mp.right.cols())};
  double v = 0;
  switch (s.factor) {
    case Factor::left:
      g.left = grad_raw(s, mp.left);
      v = eval_raw(s, mp.left);
      break;
    case Factor::right:
      g.right = grad_raw(s, mp.right);
      v = eval_raw(s, mp.right);
      break;
    case Factor::both_as_given:
      g.left = grad_raw(s, mp.left);
      g.right = grad_raw(s, mp.right);
      v = eval_raw(s, mp.left) + eval_raw(s, mp.right);
      break;
  }
  if (s.square) g = (2.0 * v) * g;
  return g;
}

double lie_poisson_bracket(const IntegralSpec& s1, const IntegralSpec& s2,
                           const MomentPair& mp) {
  MomentPair g1 = gradient(s1, mp);
  MomentPair g2 = gradient(s2, mp);
  return inner(mp.left, bracket(g1.left, g2.left)) +
         inner(mp.right, bracket(g1.right, g2.right));
}

nlohmann::json report_to_json(const CheckReport& r) {
  return nlohmann::json{{"check", r.check},   {"pass", r.pass},       {"worst", r.worst},
                        {"tol", r.tol},       {"samples", r.samples}, {"seed", r.seed},
                        {"detail", r.detail}};
}

int thread_budget() {
  if (const char* env = std::getenv("GEOLAB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

MomentPair random_family_point(const IntegralFamily& fam, unsigned seed) {
  GaussianRng rng(seed);
  CMat l = random_element(fam.ambient.basis, rng);
  CMat r = fam.product ? random_element(fam.ambient.basis, rng)
                       : CMat(CMat::Zero(l.rows(), l.cols()));
  return {l, r};
}

MomentPair random_image_point(const AmbientAlgebra& amb, unsigned seed) {
  GaussianRng rng(seed);
  CMat x = random_element(amb.basis, rng);
  CMat g1 = random_group_element(amb.basis, seed * 3 + 1);
  CMat g2 = random_group_element(amb.basis, seed * 3 + 2);
  return moment_bi(g1, g2, x);
}

CheckReport check_involution(const IntegralFamily& fam, int samples, unsigned seed) {
  if (samples < 1) throw std::invalid_argument("check_involution: samples must be >= 1");
  for (const IntegralSpec& s : fam.specs) validate_spec(s);
  const int n = static_cast<int>(fam.specs.size());

  struct Worst {
    double rel = -1.0;
    int i = 0, j = 0, sample = 0;
  };
  std::vector<Worst> per_sample(static_cast<size_t>(samples));

  for_samples(samples, [&](int k) {
    MomentPair mp = random_family_point(fam, seed + static_cast<unsigned>(k));
    const double mp_scale = std::max(1.0, norm(mp));
    std::vector<MomentPair> grads;
    std::vector<double> vals;
    grads.reserve(static_cast<size_t>(n));
    vals.reserve(static_cast<size_t>(n));
    for (const IntegralSpec& s : fam.specs) {
      grads.push_back(gradient(s, mp));
      vals.push_back(eval_integral(s, mp));
    }
    Worst w;
    w.sample = k;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double br = inner(mp.left, bracket(grads[static_cast<size_t>(i)].left,
                                           grads[static_cast<size_t>(j)].left)) +
                    inner(mp.right, bracket(grads[static_cast<size_t>(i)].right,
                                            grads[static_cast<size_t>(j)].right));
        double scale = (1.0 + std::abs(vals[static_cast<size_t>(i)])) *
                       (1.0 + std::abs(vals[static_cast<size_t>(j)])) * mp_scale;
        double rel = std::abs(br) / scale;
        if (rel > w.rel) {
          w.rel = rel;
          w.i = i;
          w.j = j;
        }
      }
    per_sample[static_cast<size_t>(k)] = w;
  });

  Worst top;
  for (const Worst& w : per_sample)
    if (w.rel > top.rel) top = w;

  CheckReport rep;
  rep.check = "involution:" + fam.name;
  rep.tol = 1e-8;
  rep.samples = samples;
  rep.seed = seed;
  rep.worst = std::max(top.rel, 0.0);
  rep.pass = rep.worst < rep.tol;
  if (n >= 2) {
    std::ostringstream os;
    os << "spec " << top.i + 1 << " vs spec " << top.j + 1 << " at sample " << top.sample;
    rep.detail = os.str();
  } else {
    rep.detail = "fewer than two specs, vacuous";
  }
  return rep;
}

CheckReport check_invariance(const IntegralSpec& s, const CMat& tau_left,
                             const CMat& tau_right, const AmbientAlgebra& amb,
                             int samples, unsigned seed) {
  validate_spec(s);
  if (samples < 1) throw std::invalid_argument("check_invariance: samples must be >= 1");
  if (unitarity_residual(tau_left) > 1e-8 || unitarity_residual(tau_right) > 1e-8)
    throw std::invalid_argument("check_invariance: tau components must be unitary");

  std::vector<std::pair<double, int>> per_sample(static_cast<size_t>(samples), {-1.0, 0});
  for_samples(samples, [&](int k) {
    GaussianRng rng(seed + static_cast<unsigned>(k));
    MomentPair mp{random_element(amb.basis, rng), random_element(amb.basis, rng)};
    MomentPair moved{ad_group(tau_left, mp.left), ad_group(tau_right, mp.right)};
    double v0 = eval_integral(s, mp);
    double v1 = eval_integral(s, moved);
    double scale = (1.0 + std::abs(v0)) * std::max(1.0, norm(mp));
    per_sample[static_cast<size_t>(k)] = {std::abs(v1 - v0) / scale, k};
  });

  std::pair<double, int> top{-1.0, 0};
  for (const auto& w : per_sample)
    if (w.first > top.first) top = w;

  CheckReport rep;
  rep.check = "invariance";
  rep.tol = 1e-10;
  rep.samples = samples;
  rep.seed = seed;
  rep.worst = std::max(top.first, 0.0);
  rep.pass = rep.worst < rep.tol;
  rep.detail = "worst at sample " + std::to_string(top.second);
  return rep;
}

CheckReport check_conjugation_invariance(const IntegralSpec& s, const AmbientAlgebra& amb,
                                         int samples, unsigned seed) {
  validate_spec(s);
  if (s.factor == Factor::both_as_given)
    throw std::invalid_argument("check_conjugation_invariance: needs a single-factor spec");
  if (samples < 1) throw std::invalid_argument("check_conjugation_invariance: samples >= 1");

  std::vector<std::pair<double, int>> per_sample(static_cast<size_t>(samples), {-1.0, 0});
  for_samples(samples, [&](int k) {
    GaussianRng rng(seed + static_cast<unsigned>(k));
    CMat b = random_element(amb.basis, rng);
    CMat flipped = -b.transpose();
    double v0 = eval_integral(s, b);
    double v1 = eval_integral(s, flipped);
    double scale = (1.0 + std::abs(v0)) * std::max(1.0, norm(b));
    per_sample[static_cast<size_t>(k)] = {std::abs(v1 - v0) / scale, k};
  });

  std::pair<double, int> top{-1.0, 0};
  for (const auto& w : per_sample)
    if (w.first > top.first) top = w;

  CheckReport rep;
  rep.check = "conjugation_invariance";
  rep.tol = 1e-10;
  rep.samples = samples;
  rep.seed = seed;
  rep.worst = std::max(top.first, 0.0);
  rep.pass = rep.worst < rep.tol;
  rep.detail = "worst at sample " + std::to_string(top.second);
  return rep;
}

IntegralFamily build_family(const std::string& label) {
  auto [base, arg] = parse_label(label);

  auto spec = [](Factor f, std::optional<Subalgebra> proj, int k, bool imag,
                 bool square = false) {
    IntegralSpec s;
    s.factor = f;
    s.proj = std::move(proj);
    s.power = k;
    s.imag_multiplier = imag;
    s.square = square;
    return s;
  };

  IntegralFamily fam;
  fam.name = label;

  if (base == "eschenburg" && arg == -1) {
    fam.ambient = ambient_su(3);
    fam.product = true;
    fam.expected_independent = 7;
    Subalgebra u1 = subalgebra_by_name("su3.u1_block");
    Subalgebra u2 = subalgebra_by_name("su3.u2_block");
    fam.specs = {spec(Factor::left, u1, 1, true),  spec(Factor::left, u2, 1, true),
                 spec(Factor::left, u2, 2, false), spec(Factor::left, std::nullopt, 2, false),
                 spec(Factor::left, std::nullopt, 3, true), spec(Factor::right, u1, 1, true),
                 spec(Factor::right, u2, 1, true), spec(Factor::right, u2, 2, false)};
    return fam;
  }
  if (base == "gromoll_meyer" && arg == -1) {
    fam.ambient = ambient_sp2();
    fam.product = true;
    fam.expected_independent = 7;
    fam.specs = {spec(Factor::left, subalgebra_by_name("sp2.sp1x1"), 2, false),
                 spec(Factor::right, subalgebra_by_name("sp2.so2"), 2, false),
                 spec(Factor::left, subalgebra_by_name("sp2.sp1xsp1"), 4, false),
                 spec(Factor::left, std::nullopt, 2, false),
                 spec(Factor::left, std::nullopt, 4, false),
                 spec(Factor::left, subalgebra_by_name("sp2.line_l"), 2, false),
                 spec(Factor::right, subalgebra_by_name("sp2.sp1xsp1"), 2, false)};
    return fam;
  }
  if (base == "berger_chain" && arg >= 1) {
    fam.ambient = ambient_su(arg + 1);
    fam.expected_independent = 2 * arg;
    fam.specs = u_tail_chain(arg + 1, false);
    return fam;
  }
  if (base == "sun_chain" && arg >= 2) {
    fam.ambient = ambient_su(arg);
    fam.expected_independent = 2 * (arg - 1);
    fam.specs = u_tail_chain(arg, false);
    return fam;
  }
  if (base == "son_chain" && arg >= 3) {
    fam.ambient = ambient_so(arg);
    fam.expected_independent = arg - 1;
    for (int j = 2; j <= arg; ++j) {
      std::optional<Subalgebra> proj;
      if (j < arg)
        proj = subalgebra_by_name("so" + std::to_string(arg) + ".so" + std::to_string(j) +
                                  "_tail");
      fam.specs.push_back(spec(Factor::left, std::move(proj), 2, false));
    }
    return fam;
  }
  if (base == "connected_sum" && arg >= 1) {
    fam.ambient = ambient_su(arg + 1);
    fam.expected_independent = 2 * arg;
    fam.specs = u_tail_chain(arg + 1, true);
    return fam;
  }
  throw std::invalid_argument("build_family: unknown family " + label);
}

nlohmann::json family_to_json(const IntegralFamily& fam) {
  nlohmann::json specs = nlohmann::json::array();
  for (const IntegralSpec& s : fam.specs) {
    nlohmann::json js{{"factor", factor_name(s.factor)},
                      {"k", s.power},
                      {"imag", s.imag_multiplier},
                      {"square", s.square}};
    js["proj"] = s.proj ? nlohmann::json(s.proj->name) : nlohmann::json(nullptr);
    specs.push_back(std::move(js));
  }
  return nlohmann::json{{"name", fam.name},
                        {"expected_independent", fam.expected_independent},
                        {"product", fam.product},
                        {"ambient", {{"kind", ambient_kind_name(fam.ambient.kind)},
                                     {"n", fam.ambient.n}}},
                        {"specs", std::move(specs)}};
}

IntegralFamily family_from_json(const nlohmann::json& j) {
  IntegralFamily fam;
  fam.name = j.at("name").get<std::string>();
  fam.expected_independent = j.at("expected_independent").get<int>();
  fam.product = j.at("product").get<bool>();
  fam.ambient = ambient_from(j.at("ambient").at("kind").get<std::string>(),
                             j.at("ambient").at("n").get<int>());
  for (const nlohmann::json& js : j.at("specs")) {
    IntegralSpec s;
    s.factor = factor_from_name(js.at("factor").get<std::string>());
    s.power = js.at("k").get<int>();
    s.imag_multiplier = js.at("imag").get<bool>();
    s.square = js.at("square").get<bool>();
    if (!js.at("proj").is_null()) s.proj = subalgebra_by_name(js.at("proj").get<std::string>());
    validate_spec(s);
    fam.specs.push_back(std::move(s));
  }
  if (static_cast<int>(fam.specs.size()) < fam.expected_independent)
    throw std::invalid_argument("family: fewer specs than expected independent count");
  return fam;
}

}  // namespace geolab

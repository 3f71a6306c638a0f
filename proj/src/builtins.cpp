#include "shiftwalk/builtins.hpp"

#include <cmath>
#include <stdexcept>

namespace shiftwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;

double require(const std::map<std::string, double>& params,
               const std::string& key) {
  auto it = params.find(key);
  if (it == params.end())
    throw std::invalid_argument("missing parameter '" + key + "'");
  return it->second;
}

double get_or(const std::map<std::string, double>& params,
              const std::string& key, double dflt) {
  auto it = params.find(key);
  return it == params.end() ? dflt : it->second;
}

MonotoneBranch linear_branch(double lo, double hi, double slope,
                             double intercept) {
  MonotoneBranch b;
  b.lo = lo;
  b.hi = hi;
  b.orientation = slope > 0 ? Orientation::increasing : Orientation::decreasing;
  b.left_limit = ExtendedReal(slope * lo + intercept);
  b.right_limit = ExtendedReal(slope * hi + intercept);
  b.f = [slope, intercept](double x) { return slope * x + intercept; };
  b.inverse = [slope, intercept](double y) { return (y - intercept) / slope; };
  return b;
}

ShiftPeriodicMap make_example1(double eps, double delta) {
  if (eps < 0 || delta < 0)
    throw std::invalid_argument("example1 requires eps >= 0 and delta >= 0");
  ShiftPeriodicMap m;
  m.name = "example1";
  m.params = {{"eps", eps}, {"delta", delta}};
  m.branches.push_back(linear_branch(0.0, 0.25, 4.0 + eps, 0.0));
  if (eps == delta) {
    m.branches.push_back(
        linear_branch(0.25, 0.75, -(2.0 + eps), (3.0 + eps) / 2.0));
  } else {
    m.branches.push_back(
        linear_branch(0.25, 0.5, -(2.0 + eps), (3.0 + eps) / 2.0));
    m.branches.push_back(
        linear_branch(0.5, 0.75, -(2.0 + delta), (3.0 + delta) / 2.0));
  }
  m.branches.push_back(linear_branch(0.75, 1.0, 4.0 + delta, -(3.0 + delta)));
  return m;
}

// --- example2: F(x;kappa) = P (|x-3/4|^{-1/k} - |x-1/4|^{-1/k}) + 1/2 ------

struct Example2Form {
  double kappa;
  double P;

  double eval(double x) const {
    double u = std::abs(x - 0.75);
    double w = std::abs(x - 0.25);
    if (u < 1e-300) return std::numeric_limits<double>::infinity();
    if (w < 1e-300) return -std::numeric_limits<double>::infinity();
    return P * (std::pow(u, -1.0 / kappa) - std::pow(w, -1.0 / kappa)) + 0.5;
  }

  // Solve for the distance s > 0 to a singular endpoint such that
  //   sign_near * P s^{-1/k}  + sign_far * P (half +- s)^{-1/k} + 1/2 = y,
  // with the far distance equal to far0 + far_sign * s. The left-hand side is
  // monotone in s; bisection runs on log(s) so that tiny tail preimages keep
  // full relative precision.
  double solve_s(double y, double sign_near, double far0, double far_sign) const {
    auto g = [&](double ls) {
      double s = std::exp(ls);
      double far = far0 + far_sign * s;
      return P * sign_near *
                 (std::pow(s, -1.0 / kappa) - std::pow(far, -1.0 / kappa)) +
             0.5;
    };
    double a = std::log(1e-320), b = std::log(0.25);
    double ga = g(a), gb = g(b);
    bool inc = ga < gb;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (a + b);
      if ((g(mid) < y) == inc)
        a = mid;
      else
        b = mid;
    }
    return std::exp(0.5 * (a + b));
  }
};

ShiftPeriodicMap make_example2(double kappa) {
  if (!(kappa > 0)) throw std::invalid_argument("example2 requires kappa > 0");
  Example2Form form{kappa,
                    std::pow(4.0, -1.0 / kappa) /
                        (2.0 * (1.0 - std::pow(3.0, -1.0 / kappa)))};
  ShiftPeriodicMap m;
  m.name = "example2";
  m.params = {{"kappa", kappa}};

  auto eval = [form](double x) { return form.eval(x); };

  MonotoneBranch b1;  // (0,1/4): decreasing, 0 -> -inf
  b1.lo = 0.0;
  b1.hi = 0.25;
  b1.orientation = Orientation::decreasing;
  b1.left_limit = ExtendedReal(0.0);
  b1.right_limit = ExtendedReal::neg_inf();
  b1.f = eval;
  b1.inverse = [form](double y) {
    // x = 1/4 - s, near distance to 1/4 (negative pole), far = 1/2 + s.
    return 0.25 - form.solve_s(y, -1.0, 0.5, +1.0);
  };

  MonotoneBranch b2;  // (1/4,3/4): increasing, -inf -> +inf
  b2.lo = 0.25;
  b2.hi = 0.75;
  b2.orientation = Orientation::increasing;
  b2.left_limit = ExtendedReal::neg_inf();
  b2.right_limit = ExtendedReal::pos_inf();
  b2.f = eval;
  b2.inverse = [form](double y) {
    if (y >= 0.5)  // x = 3/4 - s, near pole 3/4 (positive), far = 1/2 - s
      return 0.75 - form.solve_s(y, +1.0, 0.5, -1.0);
    // x = 1/4 + s, near pole 1/4 (negative), far = 1/2 - s
    return 0.25 + form.solve_s(y, -1.0, 0.5, -1.0);
  };

  MonotoneBranch b3;  // (3/4,1): decreasing, +inf -> 1
  b3.lo = 0.75;
  b3.hi = 1.0;
  b3.orientation = Orientation::decreasing;
  b3.left_limit = ExtendedReal::pos_inf();
  b3.right_limit = ExtendedReal(1.0);
  b3.f = eval;
  b3.inverse = [form](double y) {
    // x = 3/4 + s, near pole 3/4 (positive), far = 1/2 + s
    return 0.75 + form.solve_s(y, +1.0, 0.5, +1.0);
  };

  m.branches = {b1, b2, b3};

  // Exact tail measures: lambda{F >= y} for y >= 1 is the sum of the two
  // preimage stub lengths hugging the positive pole at 3/4.
  m.upper_tail = [form](double y) {
    if (y < 1.0) throw std::invalid_argument("upper_tail requires y >= 1");
    return form.solve_s(y, +1.0, 0.5, -1.0) + form.solve_s(y, +1.0, 0.5, +1.0);
  };
  // Antisymmetry F(1-x) = 1 - F(x): lambda{F <= -y} = lambda{F >= 1+y}.
  auto ut = m.upper_tail;
  m.lower_tail = [ut](double y) { return ut(y + 1.0); };
  return m;
}

ShiftPeriodicMap make_climbing_sine(double a) {
  if (!(a > 0)) throw std::invalid_argument("climbing_sine requires a > 0");
  ShiftPeriodicMap m;
  m.name = "climbing_sine";
  m.params = {{"a", a}};
  auto eval = [a](double x) { return x + a * std::sin(2.0 * kPi * x); };
  double c = 1.0 / (2.0 * kPi * a);
  if (c >= 1.0) {
    MonotoneBranch b;
    b.lo = 0.0;
    b.hi = 1.0;
    b.orientation = Orientation::increasing;
    b.left_limit = ExtendedReal(0.0);
    b.right_limit = ExtendedReal(1.0);
    b.f = eval;
    m.branches = {b};
  } else {
    double x1 = std::acos(-c) / (2.0 * kPi);
    double x2 = 1.0 - x1;
    MonotoneBranch b1, b2, b3;
    b1.lo = 0.0;
    b1.hi = x1;
    b1.orientation = Orientation::increasing;
    b1.left_limit = ExtendedReal(0.0);
    b1.right_limit = ExtendedReal(eval(x1));
    b1.f = eval;
    b2.lo = x1;
    b2.hi = x2;
    b2.orientation = Orientation::decreasing;
    b2.left_limit = ExtendedReal(eval(x1));
    b2.right_limit = ExtendedReal(eval(x2));
    b2.f = eval;
    b3.lo = x2;
    b3.hi = 1.0;
    b3.orientation = Orientation::increasing;
    b3.left_limit = ExtendedReal(eval(x2));
    b3.right_limit = ExtendedReal(1.0);
    b3.f = eval;
    m.branches = {b1, b2, b3};
  }
  return m;
}

ShiftPeriodicMap make_climbing_tangent() {
  ShiftPeriodicMap m;
  m.name = "climbing_tangent";
  auto eval = [](double x) { return x + std::tan(2.0 * kPi * x); };
  MonotoneBranch b1, b2, b3;
  b1.lo = 0.0;
  b1.hi = 0.25;
  b1.orientation = Orientation::increasing;
  b1.left_limit = ExtendedReal(0.0);
  b1.right_limit = ExtendedReal::pos_inf();
  b1.f = eval;
  b2.lo = 0.25;
  b2.hi = 0.75;
  b2.orientation = Orientation::increasing;
  b2.left_limit = ExtendedReal::neg_inf();
  b2.right_limit = ExtendedReal::pos_inf();
  b2.f = eval;
  b3.lo = 0.75;
  b3.hi = 1.0;
  b3.orientation = Orientation::increasing;
  b3.left_limit = ExtendedReal::neg_inf();
  b3.right_limit = ExtendedReal(1.0);
  b3.f = eval;
  m.branches = {b1, b2, b3};
  return m;
}

ShiftPeriodicMap make_pomeau_manneville(double a, double b, double eps) {
  if (!(a >= 1) || !(b >= 1) || eps < 0)
    throw std::invalid_argument(
        "pomeau_manneville requires a >= 1, b >= 1, eps >= 0");
  ShiftPeriodicMap m;
  m.name = "pomeau_manneville";
  m.params = {{"a", a}, {"b", b}, {"eps", eps}};
  // F(x) = (1+eps) x + a x^b - 1 on [0,1/2); on [1/2,1] via the odd
  // extension F(-x) = -F(x) and shift-periodicity.
  auto lower = [a, b, eps](double x) {
    return (1.0 + eps) * x + a * std::pow(x, b) - 1.0;
  };
  auto upper = [a, b, eps](double x) {
    double t = 1.0 - x;
    return 2.0 - (1.0 + eps) * t - a * std::pow(t, b);
  };
  MonotoneBranch b1, b2;
  b1.lo = 0.0;
  b1.hi = 0.5;
  b1.orientation = Orientation::increasing;
  b1.left_limit = ExtendedReal(-1.0);
  b1.right_limit = ExtendedReal(lower(0.5));
  b1.f = lower;
  b2.lo = 0.5;
  b2.hi = 1.0;
  b2.orientation = Orientation::increasing;
  b2.left_limit = ExtendedReal(upper(0.5));
  b2.right_limit = ExtendedReal(2.0);
  b2.f = upper;
  m.branches = {b1, b2};
  return m;
}

ShiftPeriodicMap make_nonint_example(double kappa) {
  ShiftPeriodicMap ex2 = make_example2(kappa);
  ShiftPeriodicMap m;
  m.name = "nonint_example";
  m.params = {{"kappa", kappa}};
  m.branches.push_back(linear_branch(0.0, 0.25, 2.0, 0.0));
  m.branches.push_back(linear_branch(0.25, 0.5, -2.0, 1.0));
  MonotoneBranch b3 = ex2.branches[1];  // (1/4,3/4), restricted to (1/2,3/4)
  b3.lo = 0.5;
  b3.left_limit = ExtendedReal(0.5);
  MonotoneBranch b4 = ex2.branches[2];  // (3/4,1)
  m.branches.push_back(b3);
  m.branches.push_back(b4);
  return m;
}

ShiftPeriodicMap make_conjugated_example1() {
  // F = h o G_r o h^{-1} + floor(G o h^{-1}) for G = example1(4,4) and
  // h(x) = x(1+x)/2, equivalently F = htilde(G(h^{-1}(x))) with htilde the
  // shift-periodic extension of h.
  auto h = [](double u) { return 0.5 * u * (1.0 + u); };
  auto hinv = [](double y) { return 0.5 * (std::sqrt(1.0 + 8.0 * y) - 1.0); };
  auto htilde = [h](double y) {
    double fl = std::floor(y);
    return h(y - fl) + fl;
  };
  auto htilde_inv = [hinv](double y) {
    double fl = std::floor(y);
    return hinv(y - fl) + fl;
  };
  struct GPiece {
    double lo, hi, slope, intercept;
  };
  const GPiece g1{0.0, 0.25, 8.0, 0.0};
  const GPiece g2{0.25, 0.75, -6.0, 3.5};
  const GPiece g3{0.75, 1.0, 8.0, -7.0};

  ShiftPeriodicMap m;
  m.name = "conjugated_example1";
  auto make = [&](const GPiece& g, double llim, double rlim) {
    MonotoneBranch b;
    b.lo = h(g.lo);
    b.hi = h(g.hi);
    b.orientation =
        g.slope > 0 ? Orientation::increasing : Orientation::decreasing;
    b.left_limit = ExtendedReal(llim);
    b.right_limit = ExtendedReal(rlim);
    b.f = [=](double x) { return htilde(g.slope * hinv(x) + g.intercept); };
    b.inverse = [=](double y) {
      return h((htilde_inv(y) - g.intercept) / g.slope);
    };
    return b;
  };
  m.branches = {make(g1, 0.0, 2.0), make(g2, 2.0, -1.0), make(g3, -1.0, 1.0)};
  return m;
}

}  // namespace

ShiftPeriodicMap builtin(const std::string& name,
                         const std::map<std::string, double>& params) {
  if (name == "climbing_sine") return make_climbing_sine(require(params, "a"));
  if (name == "climbing_tangent") return make_climbing_tangent();
  if (name == "example1")
    return make_example1(require(params, "eps"), require(params, "delta"));
  if (name == "example2") return make_example2(require(params, "kappa"));
  if (name == "pomeau_manneville")
    return make_pomeau_manneville(require(params, "a"), require(params, "b"),
                                  get_or(params, "eps", 0.0));
  if (name == "nonint_example") return make_nonint_example(require(params, "kappa"));
  if (name == "conjugated_example1") return make_conjugated_example1();
  throw std::invalid_argument("unknown builtin map '" + name + "'");
}

std::vector<std::string> builtin_names() {
  return {"climbing_sine",     "climbing_tangent", "example1",
          "example2",          "pomeau_manneville", "nonint_example",
          "conjugated_example1"};
}

}  // namespace shiftwalk

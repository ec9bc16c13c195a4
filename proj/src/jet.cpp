#include "klab/jet.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace klab {

namespace {

void enumerate(int nv, int order, std::vector<std::uint8_t>& out, std::vector<int>& degs) {
  for (int deg = 0; deg <= order; ++deg) {
    // all exponent vectors with total degree `deg`, lexicographic
    std::vector<int> cur(nv, 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == nv - 1) {
        cur[pos] = left;
        for (int v : cur) out.push_back(static_cast<std::uint8_t>(v));
        degs.push_back(deg);
        return;
      }
      for (int c = left; c >= 0; --c) {
        cur[pos] = c;
        self(self, pos + 1, left - c);
      }
    };
    if (nv == 0) {
      if (deg == 0) degs.push_back(0);
      continue;
    }
    rec(rec, 0, deg);
  }
}

long encode(std::span<const int> e, int order) {
  long key = 0;
  for (int v : e) key = key * (order + 1) + v;
  return key;
}

}  // namespace

JetSpace::JetSpace(int num_vars, int order) : num_vars_(num_vars), order_(order) {
  if (num_vars < 0 || order < 0) throw std::invalid_argument("JetSpace: negative size");
  enumerate(num_vars, order, exponents_, degrees_);
  const std::size_t n = degrees_.size();
  long table = 1;
  for (int i = 0; i < num_vars; ++i) table *= (order + 1);
  lookup_.assign(static_cast<std::size_t>(table), -1);
  auto& lookup = lookup_;
  std::vector<int> tmp(num_vars);
  for (std::size_t i = 0; i < n; ++i) {
    for (int v = 0; v < num_vars; ++v) tmp[v] = exponents_[i * num_vars + v];
    lookup[encode(tmp, order)] = static_cast<long>(i);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (degrees_[a] + degrees_[b] > order) continue;
      for (int v = 0; v < num_vars; ++v)
        tmp[v] = exponents_[a * num_vars + v] + exponents_[b * num_vars + v];
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           static_cast<std::uint32_t>(lookup[encode(tmp, order)])});
    }
  }
}

long JetSpace::index_of(std::span<const int> exps) const {
  int deg = 0;
  for (int v : exps) deg += v;
  if (deg > order_) return -1;
  return lookup_[encode(exps, order_)];
}

std::shared_ptr<const JetSpace> JetSpace::get(int num_vars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{num_vars, order}];
  if (!slot) slot = std::make_shared<const JetSpace>(num_vars, order);
  return slot;
}

Jet::Jet(std::shared_ptr<const JetSpace> space, cplx value)
    : space_(std::move(space)), coef_(space_->size(), 0.0) {
  coef_[0] = value;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> space, int var, cplx value) {
  Jet j(space, value);
  if (space->order() >= 1) {
    std::vector<int> e(space->num_vars(), 0);
    e[var] = 1;
    j.coef_[space->index_of(e)] = 1.0;
  }
  return j;
}

cplx Jet::partial(std::span<const int> counts) const {
  long idx = space_->index_of(counts);
  if (idx < 0) throw std::out_of_range("Jet::partial: order exceeds truncation");
  double fact = 1.0;
  for (int c : counts)
    for (int t = 2; t <= c; ++t) fact *= t;
  return coef_[idx] * fact;
}

cplx Jet::d(int i) const {
  std::vector<int> e(space_->num_vars(), 0);
  e[i] = 1;
  return partial(e);
}

cplx Jet::dd(int i, int j) const {
  std::vector<int> e(space_->num_vars(), 0);
  e[i] += 1;
  e[j] += 1;
  return partial(e);
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  std::vector<cplx> out(coef_.size(), 0.0);
  for (const auto& p : space_->products()) out[p.out] += coef_[p.a] * o.coef_[p.b];
  coef_ = std::move(out);
  return *this;
}

Jet& Jet::operator*=(cplx c) {
  for (auto& x : coef_) x *= c;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& x : r.coef_) x = -x;
  return r;
}

Jet Jet::compose(std::span<const cplx> derivs) const {
  // g(c + d) = sum_n g^(n)(c)/n! d^n, with d nilpotent of index order+1
  const int order = space_->order();
  Jet delta = *this;
  delta.coef_[0] = 0.0;
  Jet result(space_, derivs[0]);
  Jet power(space_, 1.0);
  double fact = 1.0;
  for (int n = 1; n <= order; ++n) {
    power *= delta;
    fact *= n;
    Jet term = power;
    term *= derivs[n] / fact;
    result += term;
  }
  return result;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(const Jet& a, const Jet& b) {
  Jet r = a;
  r *= b;
  return r;
}
Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, cplx c) { return a += c; }
Jet operator+(cplx c, Jet a) { return a += c; }
Jet operator-(Jet a, cplx c) { return a -= c; }
Jet operator-(cplx c, const Jet& a) {
  Jet r = -a;
  return r += c;
}
Jet operator*(Jet a, cplx c) { return a *= c; }
Jet operator*(cplx c, Jet a) { return a *= c; }
Jet operator/(Jet a, cplx c) { return a *= (1.0 / c); }
Jet operator/(cplx c, const Jet& a) { return reciprocal(a) * c; }

Jet log(const Jet& a) {
  const int order = a.space()->order();
  const cplx c = a.value();
  std::vector<cplx> d(order + 1);
  d[0] = std::log(c);
  double f = 1.0;  // (n-1)!
  for (int n = 1; n <= order; ++n) {
    if (n > 1) f *= (n - 1);
    d[n] = ((n % 2) ? 1.0 : -1.0) * f / std::pow(c, n);
  }
  return a.compose(d);
}

Jet exp(const Jet& a) {
  const int order = a.space()->order();
  std::vector<cplx> d(order + 1, std::exp(a.value()));
  return a.compose(d);
}

Jet pow(const Jet& a, double p) {
  const int order = a.space()->order();
  const cplx c = a.value();
  std::vector<cplx> d(order + 1);
  double coef = 1.0;
  for (int n = 0; n <= order; ++n) {
    d[n] = coef * std::pow(c, p - n);
    coef *= (p - n);
  }
  return a.compose(d);
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet reciprocal(const Jet& a) {
  const int order = a.space()->order();
  const cplx c = a.value();
  if (c == 0.0) throw std::domain_error("Jet reciprocal of zero");
  std::vector<cplx> d(order + 1);
  double f = 1.0;
  for (int n = 0; n <= order; ++n) {
    if (n > 0) f *= n;
    d[n] = ((n % 2) ? -1.0 : 1.0) * f / std::pow(c, n + 1);
  }
  return a.compose(d);
}

JetPoint JetPoint::seed(std::span<const cplx> z, int order) {
  const int m = static_cast<int>(z.size());
  JetPoint p;
  p.space = JetSpace::get(2 * m, order);
  for (int j = 0; j < m; ++j) p.z.push_back(Jet::variable(p.space, j, z[j]));
  for (int j = 0; j < m; ++j) p.zbar.push_back(Jet::variable(p.space, m + j, std::conj(z[j])));
  return p;
}

Jet JetPoint::norm2() const {
  Jet s(space, 0.0);
  for (int j = 0; j < dim(); ++j) s += z[j] * zbar[j];
  return s;
}

Jet differentiate(const Jet& f, int var) {
  const auto& src = *f.space();
  if (src.order() < 1) throw std::out_of_range("differentiate: order-0 jet");
  auto dst_space = JetSpace::get(src.num_vars(), src.order() - 1);
  Jet out(dst_space, 0.0);
  std::vector<int> e(src.num_vars());
  for (std::size_t i = 0; i < dst_space->size(); ++i) {
    auto ex = dst_space->exponent(i);
    for (int v = 0; v < src.num_vars(); ++v) e[v] = ex[v];
    e[var] += 1;
    const long j = src.index_of(e);
    out.coefficients()[i] = static_cast<double>(e[var]) * f.coefficients()[j];
  }
  return out;
}

Jet truncate(const Jet& f, int order) {
  const auto& src = *f.space();
  if (order > src.order()) throw std::out_of_range("truncate: order exceeds source");
  auto dst_space = JetSpace::get(src.num_vars(), order);
  Jet out(dst_space, 0.0);
  // exponents are enumerated by increasing degree, so the low-order block is a prefix
  for (std::size_t i = 0; i < dst_space->size(); ++i) out.coefficients()[i] = f.coefficients()[i];
  return out;
}

Jet jet_determinant(std::vector<Jet> a, int n) {
  if (n == 0) throw std::invalid_argument("jet_determinant: empty matrix");
  // Gaussian elimination with pivoting on the constant term
  Jet det(a[0].space(), 1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c].value()) > std::abs(a[piv * n + c].value())) piv = r;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      det *= -1.0;
    }
    det *= a[c * n + c];
    const Jet inv = reciprocal(a[c * n + c]);
    for (int r = c + 1; r < n; ++r) {
      const Jet f = a[r * n + c] * inv;
      for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}

std::vector<cplx> complex_hessian(const Jet& f, int m) {
  std::vector<cplx> h(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) h[j * m + k] = f.dd(j, m + k);
  return h;
}

}  // namespace klab

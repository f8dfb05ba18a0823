#include "thirring/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/core.h>

#include "thirring/kernels.hpp"

namespace thirring {

FunctionSample::FunctionSample(std::vector<cplx> v, double a, double h) : values(std::move(v)), a(a), h(h) {
    if (!(h > 0.0)) throw std::invalid_argument("FunctionSample: spacing must be positive");
}

FunctionSample FunctionSample::window(std::size_t first, std::size_t count) const {
    if (first + count > values.size()) throw std::out_of_range("FunctionSample::window outside the samples");
    return {std::vector<cplx>(values.begin() + static_cast<long>(first), values.begin() + static_cast<long>(first + count)),
            x(first), h};
}

FunctionSample sample(const Profile& f, double a, double b, std::size_t count) {
    if (count < 2 || !(b > a)) throw std::invalid_argument("sample: need b > a and at least 2 points");
    const double h = (b - a) / static_cast<double>(count - 1);
    std::vector<cplx> v(count);
    for (std::size_t k = 0; k < count; ++k) v[k] = f(a + static_cast<double>(k) * h);
    return {std::move(v), a, h};
}

FunctionSample sample_psi(const Slice& s) { return {s.psi, s.axis.x0, s.axis.h}; }
FunctionSample sample_phi(const Slice& s) { return {s.phi, s.axis.x0, s.axis.h}; }

namespace {

double trapezoid(const std::vector<double>& v, double h) {
    if (v.size() < 2) return 0.0;
    double sum = 0.5 * (v.front() + v.back());
    for (std::size_t k = 1; k + 1 < v.size(); ++k) sum += v[k];
    return sum * h;
}

void check_hs_order(double s) {
    if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument(fmt::format("H^s norm needs 0 < s < 1/2, got s = {}", s));
}

// int_{z0}^{z1} (P + Q z) z^{-e} dz for 0 <= z0 < z1, e < 1.
double linear_power_integral(double z0, double l0, double z1, double l1, double e) {
    const double Q = (l1 - l0) / (z1 - z0);
    const double P = l0 - Q * z0;
    const double a = 1.0 - e;
    const double b = 2.0 - e;
    return P * (std::pow(z1, a) - std::pow(z0, a)) / a + Q * (std::pow(z1, b) - std::pow(z0, b)) / b;
}

}  // namespace

double lp_norm(const FunctionSample& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument(fmt::format("L^p norm needs p >= 1, got p = {}", p));
    if (std::isinf(p)) {
        double m = 0.0;
        for (const cplx& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    std::vector<double> w(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) w[k] = std::pow(std::abs(f.values[k]), p);
    return std::pow(trapezoid(w, f.h), 1.0 / p);
}

double hs_seminorm_sq(const FunctionSample& f, double s) {
    check_hs_order(s);
    return gagliardo_seminorm_sq(f.values, f.h, s);
}

double hs_norm(const FunctionSample& f, double s) {
    const double l2 = lp_norm(f, 2.0);
    return std::sqrt(l2 * l2 + hs_seminorm_sq(f, s));
}

double hs_norm_line(const FunctionSample& f, double s) {
    // Pairs with one point outside the interval contribute
    // 2 int |f(x)|^2 int_{outside} |x - y|^{-1-2s} dy dx = (1/s) (W(a) + W(b)).
    const double l2 = lp_norm(f, 2.0);
    const double tails = (weighted_mass(f, f.a, s) + weighted_mass(f, f.b(), s)) / s;
    return std::sqrt(l2 * l2 + hs_seminorm_sq(f, s) + tails);
}

double w1q_norm(const FunctionSample& f, double q) {
    const std::size_t n = f.size();
    if (n < 2) throw std::invalid_argument("w1q_norm: need at least 2 samples");
    std::vector<cplx> d(n);
    d[0] = (f.values[1] - f.values[0]) / f.h;
    d[n - 1] = (f.values[n - 1] - f.values[n - 2]) / f.h;
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f.values[k + 1] - f.values[k - 1]) / (2.0 * f.h);
    return lp_norm(f, q) + lp_norm(FunctionSample(std::move(d), f.a, f.h), q);
}

double weighted_mass(const FunctionSample& f, double y, double sigma) {
    if (!(sigma >= 0.0 && sigma < 0.5)) throw std::invalid_argument("weighted_mass: exponent must lie in [0, 1/2)");
    const double e = 2.0 * sigma;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
        const double x0 = f.x(k);
        const double x1 = f.x(k + 1);
        const double m0 = std::norm(f.values[k]);
        const double m1 = std::norm(f.values[k + 1]);
        auto piece = [&](double l, double r) {
            if (!(r > l)) return 0.0;
            const double ml = m0 + (m1 - m0) * (l - x0) / (x1 - x0);
            const double mr = m0 + (m1 - m0) * (r - x0) / (x1 - x0);
            if (l >= y) return linear_power_integral(l - y, ml, r - y, mr, e);
            return linear_power_integral(y - r, mr, y - l, ml, e);
        };
        if (y > x0 && y < x1) {
            total += piece(x0, y) + piece(y, x1);
        } else {
            total += piece(x0, x1);
        }
    }
    return total;
}

namespace {

std::vector<double> row_l2(const NullGrid& grid, std::span<const cplx> v, bool rows_alpha) {
    const std::size_t n = grid.size();
    if (v.size() != n * n) throw std::invalid_argument("mixed norm: field does not match the grid");
    std::vector<double> out(n);
    std::vector<double> tmp(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) tmp[b] = std::norm(rows_alpha ? v[a * n + b] : v[b * n + a]);
        out[a] = std::sqrt(trapezoid(tmp, grid.spacing()));
    }
    return out;
}

// max_a ||v(a, .)||_2 + int ||d_a v(a, .)||_2 da, with a the alpha index if rows_alpha.
double mixed_norm(const NullGrid& grid, std::span<const cplx> v, bool rows_alpha) {
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const std::vector<double> rows = row_l2(grid, v, rows_alpha);
    const double sup = *std::max_element(rows.begin(), rows.end());
    auto at = [&](std::size_t a, std::size_t b) { return rows_alpha ? v[a * n + b] : v[b * n + a]; };
    std::vector<double> deriv(n);
    std::vector<double> tmp(n);
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t lo = a == 0 ? 0 : a - 1;
        const std::size_t hi = a + 1 == n ? a : a + 1;
        const double span = static_cast<double>(hi - lo) * h;
        for (std::size_t b = 0; b < n; ++b) tmp[b] = std::norm((at(hi, b) - at(lo, b)) / span);
        deriv[a] = std::sqrt(trapezoid(tmp, h));
    }
    return sup + trapezoid(deriv, h);
}

}  // namespace

double yr_norm(const NullGrid& grid, std::span<const cplx> psi) { return mixed_norm(grid, psi, true); }

double xr_norm(const NullGrid& grid, std::span<const cplx> phi) { return mixed_norm(grid, phi, false); }

double l2beta_linfalpha(const NullGrid& grid, std::span<const cplx> psi) {
    const std::size_t n = grid.size();
    if (psi.size() != n * n) throw std::invalid_argument("mixed norm: field does not match the grid");
    std::vector<double> sup(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) sup[j] = std::max(sup[j], std::norm(psi[i * n + j]));
    }
    return std::sqrt(trapezoid(sup, grid.spacing()));
}

double concentration_function(std::span<const cplx> f, std::span<const cplx> g, double h, double r) {
    if (f.size() != g.size()) throw std::invalid_argument("concentration_function: length mismatch");
    if (!(r > 0.0)) throw std::invalid_argument("concentration_function: radius must be positive");
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    std::vector<double> cumulative(n, 0.0);
    double prev = std::norm(f[0]) + std::norm(g[0]);
    for (std::size_t k = 1; k < n; ++k) {
        const double cur = std::norm(f[k]) + std::norm(g[k]);
        cumulative[k] = cumulative[k - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    const double cells = std::floor(r / h + 1e-9);
    if (cells < 1.0) return 0.0;
    const std::size_t w = cells >= static_cast<double>(n) ? n : static_cast<std::size_t>(cells);
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k > w ? k - w : 0;
        const std::size_t hi = std::min(n - 1, k + w);
        best = std::max(best, cumulative[hi] - cumulative[lo]);
    }
    return best;
}

double taper(double x, double R) noexcept {
    const double ax = std::abs(x);
    if (ax <= R) return 1.0;
    if (ax >= 2.0 * R) return 0.0;
    const double u = (ax - R) / R;
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

FunctionSample extend(const FunctionSample& f) {
    const std::size_t n = f.size();
    if (n < 2 || (n - 1) % 2 != 0) throw std::invalid_argument("extend: need an odd sample count on [-R, R]");
    const std::size_t half = (n - 1) / 2;
    const double R = static_cast<double>(half) * f.h;
    if (std::abs(f.a + R) > 1e-9 * std::max(1.0, R)) throw std::invalid_argument("extend: samples must lie on [-R, R]");
    const std::size_t m = 4 * half + 1;
    std::vector<cplx> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        // Output index k sits at x = (k - 2 half) h; input index of x is k - half.
        const long rel = static_cast<long>(k) - static_cast<long>(2 * half);
        const double x = static_cast<double>(rel) * f.h;
        long src;
        if (rel > static_cast<long>(half)) {
            src = 2 * static_cast<long>(half) - rel;  // 2R - x
        } else if (rel < -static_cast<long>(half)) {
            src = -2 * static_cast<long>(half) - rel;  // -2R - x
        } else {
            src = rel;
        }
        const cplx v = f.values[static_cast<std::size_t>(src + static_cast<long>(half))];
        out[k] = std::abs(rel) > static_cast<long>(half) ? taper(x, R) * v : v;
    }
    return {std::move(out), -2.0 * R, f.h};
}

NormReport norm_report(const FunctionSample& f, const NormSpec& spec, std::string label) {
    NormReport r;
    r.label = std::move(label);
    r.a = f.a;
    r.b = f.b();
    r.h = f.h;
    r.samples = f.size();
    r.spec = spec;
    r.l2 = lp_norm(f, 2.0);
    r.lp = lp_norm(f, spec.p());
    r.linf = lp_norm(f, std::numeric_limits<double>::infinity());
    r.hs_seminorm = std::sqrt(hs_seminorm_sq(f, spec.s));
    r.hs = std::sqrt(r.l2 * r.l2 + r.hs_seminorm * r.hs_seminorm);
    r.w1q = w1q_norm(f, spec.q());
    return r;
}

// ---------------------------------------------------------------------------

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Member `index` of the seeded test family; independent of the family size so that a
// doubled family contains the base one.
ProfileSpec family_member(std::uint64_t seed, std::size_t index, double s) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + index);
    switch (index % 3) {
        case 0:
            return GaussianProfile{uniform(rng, 0.5, 2.0), uniform(rng, 0.2, 1.5), uniform(rng, -1.5, 1.5),
                                   uniform(rng, -4.0, 4.0)};
        case 1: {
            const double lo = uniform(rng, -1.5, 0.5);
            return BoxProfile{uniform(rng, 0.5, 2.0), lo, lo + uniform(rng, 0.2, 1.0)};
        }
        default: {
            const double lo = uniform(rng, -1.5, 0.0);
            SobolevRandomProfile p;
            p.s = s;
            p.delta = 0.1;
            p.lo = lo;
            p.hi = lo + uniform(rng, 0.5, 1.5);
            p.modes = 32;
            p.amplitude = uniform(rng, 0.5, 1.5);
            p.seed = rng();
            return p;
        }
    }
}

FunctionSample on_interval(const Profile& f, double a, double b, std::size_t per_unit) {
    const auto cells = static_cast<std::size_t>(std::llround((b - a) * static_cast<double>(per_unit)));
    return sample(f, a, b, cells + 1);
}

double finite_or_inf(double ratio) { return std::isfinite(ratio) ? ratio : std::numeric_limits<double>::infinity(); }

}  // namespace

double hardy_max_ratio(double s, std::size_t family, std::size_t resolution, std::uint64_t seed) {
    double worst = 0.0;
    for (std::size_t k = 0; k < family; ++k) {
        const Profile f(family_member(seed, k, s));
        const FunctionSample fs = on_interval(f, -4.0, 4.0, resolution);
        std::mt19937_64 rng(seed + 1000003ULL * (k + 1));
        // Singular point at the cell midpoint nearest a random location.
        const double y0 = uniform(rng, -3.0, 3.0);
        const double y = fs.a + (std::floor((y0 - fs.a) / fs.h) + 0.5) * fs.h;
        const double lhs = std::sqrt(weighted_mass(fs, y, s));
        worst = std::max(worst, finite_or_inf(lhs / hs_norm(fs, s)));
    }
    return worst;
}

double product_max_ratio(double s, std::size_t family, std::size_t resolution, std::uint64_t seed) {
    const NormSpec spec{s};
    double worst = 0.0;
    for (std::size_t k = 0; k < family; ++k) {
        const Profile f(family_member(seed, k, s));
        std::mt19937_64 rng(seed + 7777ULL * (k + 1));
        const Profile g(GaussianProfile{uniform(rng, 0.5, 2.0), uniform(rng, 0.3, 1.5), uniform(rng, -1.0, 1.0),
                                        uniform(rng, -3.0, 3.0)});
        const FunctionSample fs = on_interval(f, -2.0, 2.0, resolution);
        const FunctionSample gs = on_interval(g, -2.0, 2.0, resolution);
        FunctionSample prod = fs;
        for (std::size_t i = 0; i < prod.size(); ++i) prod.values[i] *= std::norm(gs.values[i]);
        const double ginf = lp_norm(gs, std::numeric_limits<double>::infinity());
        const double rhs = ginf * ginf * hs_norm(fs, s) + ginf * w1q_norm(gs, spec.q()) * lp_norm(fs, spec.p());
        worst = std::max(worst, finite_or_inf(hs_norm(prod, s) / rhs));
    }
    return worst;
}

double tiling_max_ratio(double s, std::size_t family, std::size_t resolution, std::uint64_t seed, bool upper) {
    double worst = 0.0;
    const double width = upper ? 1.0 : 2.0;
    for (std::size_t k = 0; k < family; ++k) {
        const Profile f(family_member(seed, k, s));
        const FunctionSample fs = on_interval(f, -10.0, 10.0, resolution);
        const double line = hs_norm_line(fs, s);
        double tiles = 0.0;
        const auto span = static_cast<std::size_t>(std::llround(2.0 * width * static_cast<double>(resolution)));
        const int reach = static_cast<int>(10.0 - width);
        for (int j = -reach; j <= reach; ++j) {
            const auto first = static_cast<std::size_t>(std::llround((j - width + 10.0) * static_cast<double>(resolution)));
            const double v = hs_norm(fs.window(first, span + 1), s);
            tiles += v * v;
        }
        const double ratio = upper ? line * line / tiles : tiles / (line * line);
        worst = std::max(worst, finite_or_inf(ratio));
    }
    return worst;
}

double sobolev_max_ratio(double s, std::size_t family, std::size_t resolution, std::uint64_t seed) {
    const NormSpec spec{s};
    double worst = 0.0;
    for (std::size_t k = 0; k < family; ++k) {
        const Profile f(family_member(seed, k, s));
        const FunctionSample fs = on_interval(f, -4.0, 4.0, resolution);
        worst = std::max(worst, finite_or_inf(lp_norm(fs, spec.p()) / hs_norm(fs, s)));
    }
    return worst;
}

double embedding_max_ratio(std::size_t family, std::size_t resolution, std::uint64_t seed) {
    const NullGrid grid(1.0, 2 * resolution + 1);
    const std::size_t n = grid.size();
    double worst = 0.0;
    std::vector<cplx> field(n * n);
    for (std::size_t k = 0; k < family; ++k) {
        std::mt19937_64 rng(seed * 31ULL + k);
        struct Mode {
            cplx c;
            double ka, kb;
        };
        std::vector<Mode> modes(4);
        for (Mode& m : modes) {
            m.c = std::polar(uniform(rng, 0.1, 1.0), uniform(rng, 0.0, 6.283185307179586));
            m.ka = uniform(rng, -6.0, 6.0);
            m.kb = uniform(rng, -6.0, 6.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                cplx v{};
                for (const Mode& m : modes) v += m.c * std::polar(1.0, m.ka * grid.alpha(i) + m.kb * grid.beta(j));
                field[i * n + j] = v;
            }
        }
        worst = std::max(worst, finite_or_inf(l2beta_linfalpha(grid, field) / yr_norm(grid, field)));
    }
    return worst;
}

std::vector<InequalityResult> run_inequality_checkers(const CheckerConfig& c) {
    if (c.family < 50) throw std::invalid_argument("inequality checkers need a family of at least 50 functions");
    using Fn = double (*)(const CheckerConfig&, std::size_t, std::size_t);
    struct Entry {
        const char* name;
        Fn fn;
    };
    const Entry entries[] = {
        {"hardy", [](const CheckerConfig& k, std::size_t f, std::size_t r) { return hardy_max_ratio(k.s, f, r, k.seed); }},
        {"product", [](const CheckerConfig& k, std::size_t f, std::size_t r) { return product_max_ratio(k.s, f, r, k.seed); }},
        {"tiling_upper",
         [](const CheckerConfig& k, std::size_t f, std::size_t r) { return tiling_max_ratio(k.s, f, r, k.seed, true); }},
        {"tiling_lower",
         [](const CheckerConfig& k, std::size_t f, std::size_t r) { return tiling_max_ratio(k.s, f, r, k.seed, false); }},
        {"sobolev_embedding",
         [](const CheckerConfig& k, std::size_t f, std::size_t r) { return sobolev_max_ratio(k.s, f, r, k.seed); }},
        {"null_embedding", [](const CheckerConfig& k, std::size_t f, std::size_t r) { return embedding_max_ratio(f, r, k.seed); }},
    };
    std::vector<InequalityResult> out;
    for (const Entry& e : entries) {
        InequalityResult r;
        r.name = e.name;
        r.base = {c.family, c.resolution, e.fn(c, c.family, c.resolution)};
        r.doubled = {2 * c.family, 2 * c.resolution, e.fn(c, 2 * c.family, 2 * c.resolution)};
        const double lo = std::min(r.base.max_ratio, r.doubled.max_ratio);
        const double hi = std::max(r.base.max_ratio, r.doubled.max_ratio);
        r.pass = std::isfinite(hi) && lo > 0.0 && hi < 2.0 * lo;
        out.push_back(r);
    }
    return out;
}

}  // namespace thirring

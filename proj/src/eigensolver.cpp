#include "anderson/eigen.hpp"

#include "anderson/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace anderson {

namespace {

constexpr int kMaxIterations = 50;
constexpr double kInf = std::numeric_limits<double>::infinity();

double floor_pivot(double v, double pivmin) noexcept
{
    return std::abs(v) < pivmin ? -pivmin : v;
}

/// Twisted factorization of H - sigma at the index r minimizing |gamma_r|.
struct Twist {
    std::vector<double> dplus;
    std::vector<double> dminus;
    std::size_t r = 0;
    double gamma = 0.0;
};

void factor(const TridiagonalOperator& op, double sigma, double pivmin, Twist& t)
{
    const std::size_t n = op.m();
    const double* d = op.diag.data();
    const double* e = op.offdiag.data();
    t.dplus.resize(n);
    t.dminus.resize(n);

    t.dplus[0] = floor_pivot(d[0] - sigma, pivmin);
    for (std::size_t i = 1; i < n; ++i) {
        t.dplus[i] = floor_pivot(d[i] - sigma - e[i - 1] * e[i - 1] / t.dplus[i - 1], pivmin);
    }
    t.dminus[n - 1] = floor_pivot(d[n - 1] - sigma, pivmin);
    for (std::size_t i = n - 1; i-- > 0;) {
        t.dminus[i] = floor_pivot(d[i] - sigma - e[i] * e[i] / t.dminus[i + 1], pivmin);
    }

    t.r = 0;
    t.gamma = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = t.dplus[i] + t.dminus[i] - (d[i] - sigma);
        if (std::abs(g) < std::abs(t.gamma)) {
            t.gamma = g;
            t.r = i;
        }
    }
}

/// ||z||^2 for the twisted solution with z_r = 1, in plain arithmetic.
/// Components far from r underflow harmlessly.
double twisted_norm2(const TridiagonalOperator& op, const Twist& t)
{
    const std::size_t n = op.m();
    const double* e = op.offdiag.data();
    double s = 1.0;
    double z = 1.0;
    for (std::size_t i = t.r; i-- > 0;) {
        z = -(e[i] / t.dplus[i]) * z;
        s += z * z;
    }
    z = 1.0;
    for (std::size_t i = t.r + 1; i < n; ++i) {
        z = -(e[i - 1] / t.dminus[i]) * z;
        s += z * z;
    }
    return s;
}

/// Twisted solution as (log|z|, sign) with z_r = 1.
void twisted_vector(const TridiagonalOperator& op, const Twist& t, std::vector<double>& lz,
                    std::vector<signed char>& sz)
{
    const std::size_t n = op.m();
    const double* e = op.offdiag.data();
    lz.assign(n, 0.0);
    sz.assign(n, 1);
    for (std::size_t i = t.r; i-- > 0;) {
        const double ratio = -e[i] / t.dplus[i];
        lz[i] = lz[i + 1] + std::log(std::abs(ratio));
        sz[i] = static_cast<signed char>(ratio < 0.0 ? -sz[i + 1] : sz[i + 1]);
    }
    for (std::size_t i = t.r + 1; i < n; ++i) {
        const double ratio = -e[i - 1] / t.dminus[i];
        lz[i] = lz[i - 1] + std::log(std::abs(ratio));
        sz[i] = static_cast<signed char>(ratio < 0.0 ? -sz[i - 1] : sz[i - 1]);
    }
}

double log_sum_exp2(const std::vector<double>& lz)
{
    double mx = -kInf;
    for (double v : lz) {
        mx = std::max(mx, v);
    }
    double s = 0.0;
    for (double v : lz) {
        s += std::exp(2.0 * (v - mx));
    }
    return 2.0 * mx + std::log(s);
}

/// Signed overlap sum_i a_i b_i of two log-domain vectors.
double log_dot(const std::vector<double>& la, const std::vector<signed char>& sa,
               const std::vector<double>& lb, const std::vector<signed char>& sb)
{
    double s = 0.0;
    for (std::size_t i = 0; i < la.size(); ++i) {
        const double l = la[i] + lb[i];
        if (l > -745.0) {
            s += static_cast<double>(sa[i] * sb[i]) * std::exp(l);
        }
    }
    return s;
}

/// a <- a - c b in the log domain.
void log_axpy(std::vector<double>& la, std::vector<signed char>& sa, double c,
              const std::vector<double>& lb, const std::vector<signed char>& sb)
{
    if (c == 0.0) {
        return;
    }
    const double lc = std::log(std::abs(c));
    const int sc = c < 0.0 ? -1 : 1;
    for (std::size_t i = 0; i < la.size(); ++i) {
        const double lt = lc + lb[i];
        if (sb[i] == 0 || lt < la[i] - 40.0) {
            continue;
        }
        const double mx = std::max(la[i], lt);
        const double v = static_cast<double>(sa[i]) * std::exp(la[i] - mx) -
                         static_cast<double>(sc * sb[i]) * std::exp(lt - mx);
        if (v == 0.0) {
            la[i] = -kInf;
            sa[i] = 0;
        } else {
            la[i] = mx + std::log(std::abs(v));
            sa[i] = static_cast<signed char>(v < 0.0 ? -1 : 1);
        }
    }
}

struct RawVector {
    double lambda;
    double residual;
    std::vector<double> lz;
    std::vector<signed char> sz;
};

RawVector refine(const TridiagonalOperator& op, const EigenBracket& br, double pivmin,
                 double hnorm)
{
    Twist t;
    double sigma = 0.5 * (br.lo + br.hi);
    double best_sigma = sigma;
    double best_res = kInf;
    Twist best;
    const double target = 1e-14 * hnorm;

    for (int it = 0; it < kMaxIterations; ++it) {
        factor(op, sigma, pivmin, t);
        const double nrm2 = twisted_norm2(op, t);
        const double res = std::abs(t.gamma) / std::sqrt(nrm2);
        if (res < best_res) {
            best_res = res;
            best_sigma = sigma;
            best = t;
        }
        if (res <= target) {
            break;
        }
        const double next = std::clamp(sigma + t.gamma / nrm2, br.lo, br.hi);
        if (next == sigma) {
            break;
        }
        sigma = next;
    }
    if (!(best_res <= 1e-8 * hnorm)) {
        throw NonConvergence("eigenvector residual " + std::to_string(best_res) +
                             " exceeds 1e-8 ||H|| near lambda = " + std::to_string(best_sigma));
    }
    RawVector v{best_sigma, best_res, {}, {}};
    twisted_vector(op, best, v.lz, v.sz);
    return v;
}

EigenPair expand(const TridiagonalOperator& op, std::size_t k, RawVector&& v)
{
    const Grid& g = op.grid;
    const std::size_t nodes = g.n() + 1;
    EigenPair p;
    p.k = k;
    p.lambda = v.lambda;
    p.bc = op.bc;
    p.grid = g;
    p.residual = v.residual;
    p.phi.assign(nodes, 0.0);
    p.log_abs.assign(nodes, -kInf);
    p.sign.assign(nodes, 0);

    const double lnorm = 0.5 * (log_sum_exp2(v.lz) + std::log(g.dx()));
    const signed char flip = v.sz.front() < 0 ? -1 : 1;
    for (std::size_t j = 0; j < op.m(); ++j) {
        const std::size_t i = op.node(j);
        p.log_abs[i] = v.lz[j] - lnorm;
        p.sign[i] = static_cast<signed char>(flip * v.sz[j]);
        p.phi[i] = p.sign[i] * std::exp(p.log_abs[i]);
    }
    return p;
}

} // namespace

double default_tolerance(const TridiagonalOperator& op) noexcept
{
    return 1e-10 * std::max(1.0, op.diag_norm());
}

std::vector<EigenBracket> bracket_eigenvalues(const TridiagonalOperator& op, std::size_t k,
                                              double tol)
{
    if (k == 0 || k > op.m()) {
        throw DomainError("bracket_eigenvalues: need 1 <= k <= m");
    }
    if (!(tol > 0.0)) {
        throw DomainError("bracket_eigenvalues: tol must be positive");
    }
    const auto [glo, ghi] = op.gershgorin();
    const double lo0 = glo - tol;
    // the k-th eigenvalue usually sits far below the Gershgorin top
    double step = 1.0;
    double hi0 = std::min(ghi + tol, lo0 + step);
    while (sturm_count(op, hi0) < k) {
        step *= 2.0;
        hi0 = std::min(ghi + tol, lo0 + step);
    }

    std::vector<EigenBracket> br(k, EigenBracket{lo0, hi0});
    std::vector<double> mids;
    std::vector<std::size_t> counts;
    for (;;) {
        mids.clear();
        for (const auto& b : br) {
            if (b.hi - b.lo > tol) {
                mids.push_back(0.5 * (b.lo + b.hi));
            }
        }
        if (mids.empty()) {
            break;
        }
        std::sort(mids.begin(), mids.end());
        mids.erase(std::unique(mids.begin(), mids.end()), mids.end());
        counts.resize(mids.size());
        sturm_count_multi(op, mids, counts);
        // every probe informs every interval
        for (std::size_t q = 0; q < mids.size(); ++q) {
            for (std::size_t j = 0; j < k; ++j) {
                auto& b = br[j];
                if (mids[q] <= b.lo || mids[q] >= b.hi) {
                    continue;
                }
                if (counts[q] >= j + 1) {
                    b.hi = mids[q];
                } else {
                    b.lo = mids[q];
                }
            }
        }
    }
    return br;
}

std::vector<EigenPair> bottom_eigenpairs(const TridiagonalOperator& op, std::size_t k, double tol)
{
    if (!(tol > 0.0)) {
        tol = default_tolerance(op);
    }
    const std::vector<EigenBracket> br = bracket_eigenvalues(op, k, tol);
    const double pivmin = pivot_floor(op);
    const double hnorm = op.norm();

    std::vector<RawVector> raw;
    raw.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        RawVector v = refine(op, br[j], pivmin, hnorm);
        const double lnorm = 0.5 * log_sum_exp2(v.lz);
        for (double& l : v.lz) {
            l -= lnorm;
        }
        for (std::size_t i = 0; i < j; ++i) {
            if (std::abs(v.lambda - raw[i].lambda) >= 1e3 * tol) {
                continue;
            }
            const double c = log_dot(v.lz, v.sz, raw[i].lz, raw[i].sz);
            if (std::abs(c) > 1e-10) {
                log_axpy(v.lz, v.sz, c, raw[i].lz, raw[i].sz);
                const double ln = 0.5 * log_sum_exp2(v.lz);
                for (double& l : v.lz) {
                    l -= ln;
                }
            }
        }
        raw.push_back(std::move(v));
    }

    std::vector<EigenPair> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        out.push_back(expand(op, j + 1, std::move(raw[j])));
    }
    return out;
}

double eigen_residual(const TridiagonalOperator& op, const EigenPair& pair)
{
    const std::size_t m = op.m();
    std::vector<double> x(m);
    std::vector<double> y(m);
    for (std::size_t j = 0; j < m; ++j) {
        x[j] = pair.phi[op.node(j)];
    }
    op.apply(x, y);
    double r2 = 0.0;
    double x2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double r = y[j] - pair.lambda * x[j];
        r2 += r * r;
        x2 += x[j] * x[j];
    }
    return std::sqrt(r2 / x2);
}

double inner_product(const EigenPair& a, const EigenPair& b)
{
    if (!(a.grid == b.grid)) {
        throw DomainError("inner_product: eigenpairs live on different grids");
    }
    return log_dot(a.log_abs, a.sign, b.log_abs, b.sign) * a.grid.dx();
}

SignedLog boundary_gap(const EigenPair& dirichlet, const EigenPair& neumann)
{
    if (dirichlet.bc != BoundaryCondition::Dirichlet || neumann.bc != BoundaryCondition::Neumann) {
        throw DomainError("boundary_gap: need a Dirichlet and a Neumann pair");
    }
    SignedLog out;
    const double ov = inner_product(dirichlet, neumann);
    if (std::abs(ov) < 0.5) {
        const double d = neumann.lambda - dirichlet.lambda;
        out.log_abs = std::log(std::abs(d));
        out.sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        return out;
    }
    const std::size_t n = dirichlet.grid.n();
    const double l0 = neumann.log_abs[0] + dirichlet.log_abs[1];
    const double l1 = neumann.log_abs[n] + dirichlet.log_abs[n - 1];
    const int s0 = neumann.sign[0] * dirichlet.sign[1];
    const int s1 = neumann.sign[n] * dirichlet.sign[n - 1];
    const double mx = std::max(l0, l1);
    if (!std::isfinite(mx)) {
        return out;
    }
    const double v = s0 * std::exp(l0 - mx) + s1 * std::exp(l1 - mx);
    if (v == 0.0) {
        return out;
    }
    out.log_abs = mx + std::log(std::abs(v)) - std::log(dirichlet.grid.dx() * std::abs(ov));
    out.sign = (v > 0.0) == (ov > 0.0) ? -1 : 1;
    return out;
}

} // namespace anderson

#include "atomgraph/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace atomgraph {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
// Tensor quadrature guard for kernels without product structure.
constexpr std::size_t max_dense_arity = 4;

// Contracts axes 1..r-1 of a row-major m^r tensor with the given vectors.
std::vector<double> contract(const std::vector<double>& t, std::size_t m, std::size_t r,
                             const std::vector<const std::vector<double>*>& v) {
    std::vector<double> cur;
    const std::vector<double>* src = &t;
    std::size_t size = t.size();
    for (std::size_t axis = r - 1; axis >= 1; --axis) {
        const std::vector<double>& vec = *v[axis - 1];
        std::vector<double> next(size / m, 0.0);
        for (std::size_t q = 0; q < next.size(); ++q) {
            const double* row = src->data() + q * m;
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += row[j] * vec[j];
            next[q] = s;
        }
        cur = std::move(next);
        src = &cur;
        size /= m;
    }
    return r == 1 ? t : cur;
}

}  // namespace

DiscreteBP::DiscreteBP(const Hyperkernel& hk)
    : space_(hk.family().space_ptr()), edge_(edge_kernel(hk)) {
    if (edge_.divergent) fail(Errc::divergent_kernel, "clique series diverges; the branching process is undefined");
    const std::size_t m = space_->size();
    std::vector<std::pair<std::size_t, GridKernel>> by_arity;
    auto slot = [&](std::size_t r) -> GridKernel& {
        for (auto& [a, k] : by_arity)
            if (a == r) return k;
        by_arity.emplace_back(r, GridKernel(space_, r));
        return by_arity.back().second;
    };
    for (const auto& e : hk.family().entries()) {
        const std::size_t r = e.shape.order();
        if (r < 2 || e.kernel.is_zero()) continue;
        slot(r).add(GridKernel::discretize(e.kernel, space_));
    }
    if (hk.series()) {
        const auto& s = *hk.series();
        for (std::size_t r = std::max<std::size_t>(2, s.min_arity); r <= s.last_explicit(); ++r) {
            const double c = s.value(r);
            if (c > 0.0) slot(r).add_term({c, std::vector<Factor>(r, Factor::ones())});
        }
    }
    std::sort(by_arity.begin(), by_arity.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<Factor> unique;
    auto factor_id = [&](const Factor& f) {
        for (std::size_t i = 0; i < unique.size(); ++i)
            if (unique[i] == f) return i;
        unique.push_back(f);
        tab_.push_back(f.tabulate(*space_));
        return unique.size() - 1;
    };
    const auto w = space_->weights();
    lambda_.assign(m, 0.0);
    for (auto& [r, k] : by_arity) {
        if (k.is_zero()) continue;
        std::vector<Sep> seps;
        std::vector<double> rate(m, 0.0);
        for (const auto& t : k.terms()) {
            Sep s{t.coef, {}};
            for (const auto& f : t.factors) s.factor.push_back(factor_id(f));
            double rest = t.coef;
            for (std::size_t i = 1; i < r; ++i) {
                const auto& phi = tab_[s.factor[i]];
                double a = 0.0;
                for (std::size_t j = 0; j < m; ++j) a += w[j] * phi[j];
                rest *= a;
            }
            const auto& phi0 = tab_[s.factor[0]];
            for (std::size_t i = 0; i < m; ++i) rate[i] += rest * phi0[i];
            seps.push_back(std::move(s));
        }
        if (k.has_dense()) {
            const std::vector<double> wv(w.begin(), w.end());
            const std::vector<const std::vector<double>*> vs(r - 1, &wv);
            const auto d = contract(k.dense(), m, r, vs);
            for (std::size_t i = 0; i < m; ++i) rate[i] += d[i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            rate[i] *= static_cast<double>(r);
            lambda_[i] += rate[i];
            if (!std::isfinite(lambda_[i])) fail(Errc::divergent_kernel, "infinite clique rate at a grid node");
        }
        arities_.push_back({r, std::move(k)});
        rates_.push_back(std::move(rate));
        seps_.push_back(std::move(seps));
    }
}

std::vector<double> DiscreteBP::S_apply(std::span<const double> f) const {
    const std::size_t m = size();
    require(f.size() == m, "grid function has the wrong length");
    for (double v : f) require(v >= 0.0 && v <= 1.0, "S is defined for functions with values in [0,1]");
    const auto w = space_->weights();
    // Per unique factor: a = sum w phi, d = sum w phi f, b = sum w phi (1 - f).
    std::vector<double> A(tab_.size()), D(tab_.size()), B(tab_.size());
    for (std::size_t u = 0; u < tab_.size(); ++u) {
        double a = 0.0, d = 0.0, b = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double x = w[j] * tab_[u][j];
            a += x;
            d += x * f[j];
            b += x * (1.0 - f[j]);
        }
        A[u] = a;
        D[u] = d;
        B[u] = b;
    }
    std::vector<double> out(m, 0.0);
    for (std::size_t ai = 0; ai < arities_.size(); ++ai) {
        const std::size_t r = arities_[ai].r;
        for (const auto& s : seps_[ai]) {
            // prod a - prod b = sum_k (prod_{i<k} b_i) d_k (prod_{i>k} a_i); no cancellation.
            std::vector<double> suffix(r + 1, 1.0);
            for (std::size_t i = r - 1; i >= 1; --i) suffix[i] = suffix[i + 1] * A[s.factor[i]];
            double prefix = 1.0, bracket = 0.0;
            for (std::size_t k = 1; k < r; ++k) {
                bracket += prefix * D[s.factor[k]] * suffix[k + 1];
                prefix *= B[s.factor[k]];
            }
            const double c = static_cast<double>(r) * s.coef * bracket;
            if (c == 0.0) continue;
            const auto& phi0 = tab_[s.factor[0]];
            for (std::size_t i = 0; i < m; ++i) out[i] += c * phi0[i];
        }
        const auto& k = arities_[ai].kernel;
        if (!k.has_dense()) continue;
        if (r > max_dense_arity)
            fail(Errc::arity_too_large, "S needs tensor quadrature beyond arity 4 for a non-factorizable kernel");
        // 1 - prod_{i=2}^r (1 - f_i) = sum_k f_k prod_{i<k} (1 - f_i).
        std::vector<double> wf(m), wg(m), wv(w.begin(), w.end());
        for (std::size_t j = 0; j < m; ++j) {
            wf[j] = w[j] * f[j];
            wg[j] = w[j] * (1.0 - f[j]);
        }
        for (std::size_t kk = 1; kk < r; ++kk) {
            std::vector<const std::vector<double>*> vs(r - 1);
            for (std::size_t i = 1; i < r; ++i) vs[i - 1] = i < kk ? &wg : i == kk ? &wf : &wv;
            const auto d = contract(k.dense(), m, r, vs);
            for (std::size_t i = 0; i < m; ++i) out[i] += static_cast<double>(r) * d[i];
        }
    }
    return out;
}

std::vector<double> DiscreteBP::Phi_apply(std::span<const double> f) const {
    auto s = S_apply(f);
    for (double& v : s) v = -std::expm1(-v);
    return s;
}

std::vector<double> DiscreteBP::T_apply(std::span<const double> f) const {
    if (edge_.divergent) fail(Errc::divergent_kernel, "edge kernel diverges");
    return edge_.kernel.apply(f);
}

const char* to_string(SimulationResult::Outcome o) {
    switch (o) {
        case SimulationResult::Outcome::died: return "died";
        case SimulationResult::Outcome::reached_cap: return "reached_cap";
        case SimulationResult::Outcome::ambiguous: return "ambiguous";
    }
    return "?";
}

BranchingSampler::BranchingSampler(const DiscreteBP& bp) : bp_(&bp) {
    const std::size_t m = bp.size();
    const auto w = bp.space().weights();
    root_ = Dist(w.begin(), w.end());
    std::vector<std::shared_ptr<Dist>> by_factor(bp.tab_.size());
    auto position = [&](std::size_t u) {
        if (!by_factor[u]) {
            std::vector<double> p(m);
            for (std::size_t j = 0; j < m; ++j) p[j] = w[j] * bp.tab_[u][j];
            by_factor[u] = std::make_shared<Dist>(p.begin(), p.end());
        }
        return by_factor[u];
    };
    for (std::size_t a = 0; a < bp.arities_.size(); ++a) {
        const std::size_t r = bp.arities_[a].r;
        const auto& k = bp.arities_[a].kernel;
        std::vector<Source> src;
        // Per node, the rate contributed by each source.
        std::vector<std::vector<double>> share;
        for (const auto& s : bp.seps_[a]) {
            Source so;
            double rest = s.coef;
            for (std::size_t i = 1; i < r; ++i) {
                so.positions.push_back(position(s.factor[i]));
                double t = 0.0;
                for (std::size_t j = 0; j < m; ++j) t += w[j] * bp.tab_[s.factor[i]][j];
                rest *= t;
            }
            std::vector<double> sh(m);
            for (std::size_t i = 0; i < m; ++i) sh[i] = rest * bp.tab_[s.factor[0]][i];
            share.push_back(std::move(sh));
            src.push_back(std::move(so));
        }
        if (k.has_dense()) {
            Source so;
            const std::size_t row = k.dense().size() / m;
            std::vector<double> sh(m);
            std::vector<double> p(row);
            for (std::size_t i = 0; i < m; ++i) {
                double total = 0.0;
                for (std::size_t q = 0; q < row; ++q) {
                    double x = k.dense()[i * row + q];
                    std::size_t rem = q;
                    for (std::size_t pos = 1; pos < r; ++pos) {
                        x *= w[rem % m];
                        rem /= m;
                    }
                    p[q] = x;
                    total += x;
                }
                sh[i] = total;
                so.rows.emplace_back(total > 0.0 ? Dist(p.begin(), p.end()) : Dist());
            }
            share.push_back(std::move(sh));
            src.push_back(std::move(so));
        }
        std::vector<Dist> choice;
        if (src.size() > 1) {
            std::vector<double> c(src.size());
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t s = 0; s < src.size(); ++s) c[s] = share[s][i];
                choice.emplace_back(c.begin(), c.end());
            }
        }
        sources_.push_back(std::move(src));
        choice_.push_back(std::move(choice));
    }
}

void BranchingSampler::children(std::size_t a, std::size_t node, Rng& rng, std::vector<std::size_t>& out) const {
    const std::size_t r = bp_->arities_[a].r;
    const std::size_t m = bp_->size();
    const std::size_t s = choice_[a].empty() ? 0 : choice_[a][node](rng);
    auto& src = const_cast<Source&>(sources_[a][s]);
    if (!src.positions.empty()) {
        for (auto& p : src.positions) out.push_back((*p)(rng));
        return;
    }
    std::size_t q = src.rows[node](rng);
    for (std::size_t pos = 1; pos < r; ++pos) {
        out.push_back(q % m);
        q /= m;
    }
}

SimulationResult BranchingSampler::run(std::optional<std::size_t> root, const SimulationCaps& caps, Rng& rng) const {
    require(caps.max_particles > 0 && caps.max_generations > 0, "simulation caps must be positive");
    SimulationResult res;
    std::vector<std::size_t> current{root ? *root : root_(rng)}, next;
    require(current[0] < bp_->size(), "root node out of range");
    res.total_size = 1;
    res.generation_sizes.push_back(1);
    if (res.total_size >= caps.max_particles) {
        res.outcome = SimulationResult::Outcome::reached_cap;
        return res;
    }
    for (std::size_t gen = 1; gen <= caps.max_generations; ++gen) {
        next.clear();
        for (std::size_t x : current) {
            for (std::size_t a = 0; a < bp_->arities_.size(); ++a) {
                const double mean = bp_->rates_[a][x];
                if (!(mean > 0.0)) continue;
                std::poisson_distribution<std::size_t> po(mean);
                const std::size_t cliques = po(rng);
                for (std::size_t c = 0; c < cliques; ++c) children(a, x, rng, next);
            }
            if (res.total_size + next.size() >= caps.max_particles) break;
        }
        if (next.empty()) {
            res.outcome = SimulationResult::Outcome::died;
            return res;
        }
        res.total_size += next.size();
        res.generation_sizes.push_back(next.size());
        if (res.total_size >= caps.max_particles) {
            res.outcome = SimulationResult::Outcome::reached_cap;
            return res;
        }
        std::swap(current, next);
    }
    res.outcome = SimulationResult::Outcome::ambiguous;
    return res;
}

SimulationResult simulate(const DiscreteBP& bp, std::optional<std::size_t> root, const SimulationCaps& caps, Rng& rng) {
    return BranchingSampler(bp).run(root, caps, rng);
}

SurvivalSolution iterate_phi(const DiscreteBP& bp, std::vector<double> f, const SurvivalOptions& opt,
                             const IterateObserver& observer) {
    require(f.size() == bp.size(), "initial function has the wrong length");
    SurvivalSolution sol;
    double prev_step = inf;
    std::size_t stalled = 0;
    auto finish = [&](SurvivalSolution& s) {
        const auto w = bp.space().weights();
        s.rho = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) s.rho += w[i] * f[i];
        s.rho_x = f;
    };
    if (observer) observer(0, f);
    for (std::size_t it = 1; it <= opt.max_iter; ++it) {
        auto g = bp.Phi_apply(f);
        double step = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) step = std::max(step, std::abs(g[i] - f[i]));
        f = std::move(g);
        sol.iterations = it;
        sol.residual = step;
        if (observer) observer(it, f);
        if (step < opt.tol) {
            finish(sol);
            return sol;
        }
        stalled = step > 0.999 * prev_step ? stalled + 1 : 0;
        prev_step = step;
        if (stalled >= opt.plateau) {
            finish(sol);
            throw MaxIterExceeded("fixed-point iteration stalled near criticality (step " + std::to_string(step) +
                                      " after " + std::to_string(it) + " iterations)",
                                  sol);
        }
    }
    finish(sol);
    throw MaxIterExceeded("fixed-point iteration hit max_iter", sol);
}

SurvivalSolution solve_survival(const DiscreteBP& bp, const SurvivalOptions& opt, const IterateObserver& observer) {
    return iterate_phi(bp, std::vector<double>(bp.size(), 1.0), opt, observer);
}

const char* to_string(NormEstimate::Method m) {
    switch (m) {
        case NormEstimate::Method::closed_form_rank1: return "closed-form-rank-1";
        case NormEstimate::Method::power_iteration: return "power-iteration";
        case NormEstimate::Method::divergent: return "divergent";
    }
    return "?";
}

NormEstimate operator_norm(const DiscreteBP& bp, double tol, std::size_t max_iter) {
    NormEstimate est;
    const auto& ek = bp.edge();
    if (ek.divergent) {
        est.value = inf;
        est.method = NormEstimate::Method::divergent;
        return est;
    }
    const auto& K = ek.kernel;
    const auto& space = bp.space();
    const auto w = space.weights();
    const std::size_t m = bp.size();
    // kappa_e = c psi(x) psi(y): the norm is c ||psi||^2.
    if (!K.has_dense() && K.terms().size() == 1 && K.terms()[0].factors[0] == K.terms()[0].factors[1]) {
        const auto& t = K.terms()[0];
        est.method = NormEstimate::Method::closed_form_rank1;
        const Factor& psi = t.factors[0];
        if (psi.kind() == Factor::Kind::power && !space.is_finite() && 2.0 * psi.gamma() >= 1.0) {
            est.value = inf;  // psi is not square integrable
            return est;
        }
        const auto tab = psi.tabulate(space);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w[i] * tab[i] * tab[i];
        est.value = t.coef * s;
        return est;
    }
    auto norm = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w[i] * v[i] * v[i];
        return std::sqrt(s);
    };
    std::vector<double> v(m, 1.0);
    double nv = norm(v);
    for (double& x : v) x /= nv;
    double lambda = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        auto tv = K.apply(v);
        double rq = 0.0;
        for (std::size_t i = 0; i < m; ++i) rq += w[i] * v[i] * tv[i];
        double res = 0.0;
        for (std::size_t i = 0; i < m; ++i) res += w[i] * (tv[i] - rq * v[i]) * (tv[i] - rq * v[i]);
        est.iterations = it;
        est.residual = std::sqrt(res);
        const double nt = norm(tv);
        const bool done = std::abs(rq - lambda) <= tol * std::max(1.0, std::abs(rq)) || nt == 0.0;
        lambda = rq;
        if (nt == 0.0) break;
        for (std::size_t i = 0; i < m; ++i) v[i] = tv[i] / nt;
        if (done) break;
    }
    est.value = lambda;
    est.eigenvector = std::move(v);
    return est;
}

FrequencyEstimate survival_ge_k(const DiscreteBP& bp, std::size_t k, std::size_t trials, Rng& rng) {
    require(k >= 1 && trials >= 1, "need k >= 1 and at least one trial");
    FrequencyEstimate est;
    est.trials = trials;
    if (k == 1) {
        est.value = 1.0;
        return est;
    }
    const BranchingSampler sampler(bp);
    SimulationCaps caps;
    caps.max_particles = k;
    caps.max_generations = std::numeric_limits<std::size_t>::max();
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng sub = rng.split(t);
        if (sampler.run(std::nullopt, caps, sub).outcome == SimulationResult::Outcome::reached_cap) ++hits;
    }
    est.value = static_cast<double>(hits) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(trials));
    return est;
}

void write_survival_csv(std::ostream& out, const SurvivalSolution& s, const TypeSpace& space) {
    const auto x = space.nodes();
    const auto w = space.weights();
    out << "node,weight,rho\n";
    out.precision(17);
    for (std::size_t i = 0; i < s.rho_x.size(); ++i) out << x[i] << ',' << w[i] << ',' << s.rho_x[i] << '\n';
}

}  // namespace atomgraph

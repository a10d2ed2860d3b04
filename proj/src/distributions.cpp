#include "arsym/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "arsym/errors.hpp"
#include "arsym/special_functions.hpp"
#include "arsym/util.hpp"

namespace arsym {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw invalid_parameter_error(msg);
}

void require_finite(double v, const std::string& msg) {
    require(std::isfinite(v), msg);
}

// two_point parameters are stored sorted: par = (lo, w_lo, hi, w_hi).
// shifted_mixture stores the user parameters; the centering shift is
// recomputed on the fly.
double mixture_shift(const DistModel& d) {
    return d.par[0] * d.par[1] + (1.0 - d.par[0]) * d.par[3];
}

}  // namespace

DistModel make_normal(double sigma) {
    require_finite(sigma, "normal: sigma must be finite");
    require(sigma > 0.0, "normal: sigma must be positive");
    return DistModel{DistKind::normal, {sigma}};
}

DistModel make_uniform(double a, double b) {
    require_finite(a, "uniform: a must be finite");
    require_finite(b, "uniform: b must be finite");
    require(a < b, "uniform: need a < b");
    return DistModel{DistKind::uniform, {a, b}};
}

DistModel make_centered_exponential(double rate) {
    require_finite(rate, "centered_exponential: rate must be finite");
    require(rate > 0.0, "centered_exponential: rate must be positive");
    return DistModel{DistKind::centered_exponential, {rate}};
}

DistModel make_two_point(double v1, double w1, double v2, double w2) {
    require_finite(v1, "two_point: v1 must be finite");
    require_finite(v2, "two_point: v2 must be finite");
    require(v1 != v2, "two_point: support points must differ");
    require(w1 > 0.0 && w2 > 0.0, "two_point: weights must be positive");
    require(std::fabs(w1 + w2 - 1.0) <= 1e-12, "two_point: weights must sum to 1");
    if (v1 > v2) {
        std::swap(v1, v2);
        std::swap(w1, w2);
    }
    return DistModel{DistKind::two_point, {v1, w1, v2, 1.0 - w1}};
}

DistModel make_point_mass(double v) {
    require_finite(v, "point_mass: v must be finite");
    return DistModel{DistKind::point_mass, {v}};
}

DistModel make_shifted_mixture(double w, double m1, double s1, double m2, double s2) {
    require(w > 0.0 && w < 1.0, "shifted_mixture: weight must lie in (0,1)");
    require_finite(m1, "shifted_mixture: m1 must be finite");
    require_finite(m2, "shifted_mixture: m2 must be finite");
    require(s1 > 0.0 && s2 > 0.0, "shifted_mixture: component sigmas must be positive");
    return DistModel{DistKind::shifted_mixture, {w, m1, s1, m2, s2}};
}

double cdf(const DistModel& d, double x) {
    switch (d.kind) {
        case DistKind::normal:
            return normal_cdf(x / d.par[0]);
        case DistKind::uniform: {
            if (x < d.par[0]) return 0.0;
            if (x >= d.par[1]) return 1.0;
            return (x - d.par[0]) / (d.par[1] - d.par[0]);
        }
        case DistKind::centered_exponential: {
            double rate = d.par[0];
            if (x < -1.0 / rate) return 0.0;
            return 1.0 - std::exp(-rate * x - 1.0);
        }
        case DistKind::two_point: {
            if (x < d.par[0]) return 0.0;
            if (x < d.par[2]) return d.par[1];
            return 1.0;
        }
        case DistKind::point_mass:
            return x >= d.par[0] ? 1.0 : 0.0;
        case DistKind::shifted_mixture: {
            double shift = mixture_shift(d);
            double w = d.par[0];
            return w * normal_cdf((x + shift - d.par[1]) / d.par[2]) +
                   (1.0 - w) * normal_cdf((x + shift - d.par[3]) / d.par[4]);
        }
    }
    throw invalid_parameter_error("cdf: unknown distribution kind");
}

double quantile(const DistModel& d, double t) {
    if (!(t > 0.0 && t < 1.0))
        throw invalid_parameter_error("quantile: t must lie in (0,1)");
    switch (d.kind) {
        case DistKind::normal:
            return d.par[0] * normal_quantile(t);
        case DistKind::uniform:
            return d.par[0] + t * (d.par[1] - d.par[0]);
        case DistKind::centered_exponential: {
            double rate = d.par[0];
            return -std::log1p(-t) / rate - 1.0 / rate;
        }
        case DistKind::two_point:
            return t <= d.par[1] ? d.par[0] : d.par[2];
        case DistKind::point_mass:
            return d.par[0];
        case DistKind::shifted_mixture: {
            double shift = mixture_shift(d);
            double c1 = d.par[1] - shift, c2 = d.par[3] - shift;
            double s = std::max(d.par[2], d.par[4]);
            double lo = std::min(c1, c2) - 12.0 * s;
            double hi = std::max(c1, c2) + 12.0 * s;
            while (cdf(d, lo) >= t) lo -= 8.0 * s;
            while (cdf(d, hi) < t) hi += 8.0 * s;
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (lo + hi);
                if (cdf(d, mid) >= t)
                    hi = mid;
                else
                    lo = mid;
                if (hi - lo <= 1e-15 * (std::fabs(hi) + std::fabs(lo) + 1.0)) break;
            }
            return hi;
        }
    }
    throw invalid_parameter_error("quantile: unknown distribution kind");
}

double draw(const DistModel& d, Rng& rng) { return quantile(d, rng.uniform01()); }

double dist_mean(const DistModel& d) {
    switch (d.kind) {
        case DistKind::normal:
        case DistKind::centered_exponential:
        case DistKind::shifted_mixture:
            return 0.0;
        case DistKind::uniform:
            return 0.5 * (d.par[0] + d.par[1]);
        case DistKind::two_point:
            return d.par[0] * d.par[1] + d.par[2] * d.par[3];
        case DistKind::point_mass:
            return d.par[0];
    }
    throw invalid_parameter_error("dist_mean: unknown distribution kind");
}

double dist_variance(const DistModel& d) {
    switch (d.kind) {
        case DistKind::normal:
            return d.par[0] * d.par[0];
        case DistKind::uniform: {
            double r = d.par[1] - d.par[0];
            return r * r / 12.0;
        }
        case DistKind::centered_exponential:
            return 1.0 / (d.par[0] * d.par[0]);
        case DistKind::two_point: {
            double m = dist_mean(d);
            return d.par[1] * (d.par[0] - m) * (d.par[0] - m) +
                   d.par[3] * (d.par[2] - m) * (d.par[2] - m);
        }
        case DistKind::point_mass:
            return 0.0;
        case DistKind::shifted_mixture: {
            double shift = mixture_shift(d);
            double c1 = d.par[1] - shift, c2 = d.par[3] - shift;
            double w = d.par[0];
            return w * (d.par[2] * d.par[2] + c1 * c1) +
                   (1.0 - w) * (d.par[4] * d.par[4] + c2 * c2);
        }
    }
    throw invalid_parameter_error("dist_variance: unknown distribution kind");
}

bool is_symmetric(const DistModel& d) {
    switch (d.kind) {
        case DistKind::normal:
            return true;
        case DistKind::uniform:
            return d.par[0] == -d.par[1];
        case DistKind::centered_exponential:
            return false;
        case DistKind::two_point:
            return d.par[0] == -d.par[2] && d.par[1] == d.par[3];
        case DistKind::point_mass:
            return d.par[0] == 0.0;
        case DistKind::shifted_mixture: {
            double shift = mixture_shift(d);
            double c1 = d.par[1] - shift, c2 = d.par[3] - shift;
            if (c1 == 0.0 && c2 == 0.0) return true;
            return d.par[0] == 0.5 && d.par[2] == d.par[4] && c1 == -c2;
        }
    }
    return false;
}

bool is_continuous(const DistModel& d) {
    switch (d.kind) {
        case DistKind::two_point:
        case DistKind::point_mass:
            return false;
        default:
            return true;
    }
}

namespace {

const char* kind_name(DistKind k) {
    switch (k) {
        case DistKind::normal: return "normal";
        case DistKind::uniform: return "uniform";
        case DistKind::centered_exponential: return "centered_exponential";
        case DistKind::two_point: return "two_point";
        case DistKind::point_mass: return "point_mass";
        case DistKind::shifted_mixture: return "shifted_mixture";
    }
    return "?";
}

std::size_t kind_arity(DistKind k) {
    switch (k) {
        case DistKind::normal: return 1;
        case DistKind::uniform: return 2;
        case DistKind::centered_exponential: return 1;
        case DistKind::two_point: return 4;
        case DistKind::point_mass: return 1;
        case DistKind::shifted_mixture: return 5;
    }
    return 0;
}

}  // namespace

std::string describe(const DistModel& d) {
    std::string s = kind_name(d.kind);
    s += '(';
    for (std::size_t i = 0; i < kind_arity(d.kind); ++i) {
        if (i) s += ',';
        s += fmt_double(d.par[i]);
    }
    s += ')';
    return s;
}

DistModel parse_dist(const std::string& text) {
    auto strip = [](std::string s) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        if (b == std::string::npos) return std::string();
        return s.substr(b, e - b + 1);
    };
    std::string s = strip(text);
    auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        throw config_error("distribution must look like kind(p1,...): got '" + text + "'");
    std::string name = strip(s.substr(0, open));
    std::string args = s.substr(open + 1, s.size() - open - 2);
    std::vector<double> p;
    std::string item;
    std::istringstream in(args);
    while (std::getline(in, item, ',')) {
        item = strip(item);
        try {
            std::size_t pos = 0;
            p.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw config_error("bad numeric parameter '" + item + "' in '" + text + "'");
        }
    }
    auto arity = [&](std::size_t k) {
        if (p.size() != k)
            throw config_error(name + " takes " + std::to_string(k) +
                               " parameter(s), got " + std::to_string(p.size()));
    };
    if (name == "normal") {
        arity(1);
        return make_normal(p[0]);
    }
    if (name == "uniform") {
        arity(2);
        return make_uniform(p[0], p[1]);
    }
    if (name == "centered_exponential") {
        arity(1);
        return make_centered_exponential(p[0]);
    }
    if (name == "two_point") {
        arity(4);
        return make_two_point(p[0], p[1], p[2], p[3]);
    }
    if (name == "point_mass") {
        arity(1);
        return make_point_mass(p[0]);
    }
    if (name == "shifted_mixture") {
        arity(5);
        return make_shifted_mixture(p[0], p[1], p[2], p[3], p[4]);
    }
    throw config_error("unknown distribution kind '" + name + "'");
}

double effective_weight(double rho, std::size_t n) {
    if (!(rho >= 0.0)) throw invalid_parameter_error("effective_weight: rho must be >= 0");
    if (n < 1) throw invalid_parameter_error("effective_weight: n must be >= 1");
    return std::min(1.0, rho / std::sqrt(static_cast<double>(n)));
}

double draw_mixture(const MixtureAlternative& mix, std::size_t n, Rng& rng) {
    double w = effective_weight(mix.rho, n);
    double u = rng.uniform01();
    double v = rng.uniform01();
    return u < w ? quantile(mix.q_dist, v) : quantile(mix.p_dist, v);
}

void validate_innovation_dist(const DistModel& d, const std::string& role,
                              bool require_symmetric) {
    if (std::fabs(dist_mean(d)) > 1e-12)
        throw invalid_parameter_error(role + " must have zero mean, got " +
                                      describe(d));
    if (require_symmetric && !is_symmetric(d))
        throw invalid_parameter_error(role + " must be symmetric about 0, got " +
                                      describe(d));
}

}  // namespace arsym

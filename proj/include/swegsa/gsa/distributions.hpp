#pragma once

// Input parameter distributions, sampled by inverse CDF from the counter
// RNG so any single draw is reproducible in isolation.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "swegsa/rng.hpp"

namespace swegsa::gsa {

class InvalidDistribution : public std::runtime_error {
public:
    explicit InvalidDistribution(const std::string& what) : std::runtime_error(what) {}
};

struct Normal {
    double mu, sigma;
};
struct Uniform {
    double a, b;
};
struct Triangular {
    double a, mode, b;
};
struct DiscreteUniform {
    std::vector<double> values;
};
struct Categorical {
    std::vector<std::string> labels;  // equiprobable; draws are 0-based indices
};

using Distribution = std::variant<Normal, Uniform, Triangular, DiscreteUniform, Categorical>;

struct InputParameter {
    std::string name;
    Distribution dist;
};

inline void validate(const Distribution& d, const std::string& name) {
    auto fail = [&](const std::string& msg) { throw InvalidDistribution(name + ": " + msg); };
    if (const auto* n = std::get_if<Normal>(&d)) {
        if (!(n->sigma > 0.0)) fail("normal sigma must be positive");
    } else if (const auto* u = std::get_if<Uniform>(&d)) {
        if (!(u->a < u->b)) fail("uniform requires a < b");
    } else if (const auto* t = std::get_if<Triangular>(&d)) {
        if (!(t->a < t->b)) fail("triangular requires a < b");
        if (!(t->a <= t->mode && t->mode <= t->b)) fail("triangular requires a <= mode <= b");
    } else if (const auto* du = std::get_if<DiscreteUniform>(&d)) {
        if (du->values.size() < 2) fail("discrete uniform needs at least 2 values");
    } else if (const auto* c = std::get_if<Categorical>(&d)) {
        if (c->labels.size() < 2) fail("categorical needs at least 2 labels");
    }
}

/// Inverse CDF; for discrete/categorical returns the selected value/index.
inline double quantile(const Distribution& d, double u) {
    if (const auto* n = std::get_if<Normal>(&d)) return n->mu + n->sigma * normal_quantile(u);
    if (const auto* un = std::get_if<Uniform>(&d)) return un->a + (un->b - un->a) * u;
    if (const auto* t = std::get_if<Triangular>(&d)) {
        const double fc = (t->mode - t->a) / (t->b - t->a);
        if (u < fc) return t->a + std::sqrt(u * (t->b - t->a) * (t->mode - t->a));
        return t->b - std::sqrt((1.0 - u) * (t->b - t->a) * (t->b - t->mode));
    }
    if (const auto* du = std::get_if<DiscreteUniform>(&d)) {
        const std::size_t k = du->values.size();
        std::size_t idx = static_cast<std::size_t>(u * static_cast<double>(k));
        if (idx >= k) idx = k - 1;
        return du->values[idx];
    }
    const auto& cat = std::get<Categorical>(d);
    const std::size_t k = cat.labels.size();
    std::size_t idx = static_cast<std::size_t>(u * static_cast<double>(k));
    if (idx >= k) idx = k - 1;
    return static_cast<double>(idx);
}

inline std::string describe(const Distribution& d) {
    std::ostringstream os;
    if (const auto* n = std::get_if<Normal>(&d))
        os << "normal(" << n->mu << "," << n->sigma << ")";
    else if (const auto* u = std::get_if<Uniform>(&d))
        os << "uniform(" << u->a << "," << u->b << ")";
    else if (const auto* t = std::get_if<Triangular>(&d))
        os << "triangular(" << t->a << "," << t->mode << "," << t->b << ")";
    else if (const auto* du = std::get_if<DiscreteUniform>(&d)) {
        os << "discrete(";
        for (std::size_t i = 0; i < du->values.size(); ++i) os << (i ? "," : "") << du->values[i];
        os << ")";
    } else {
        const auto& c = std::get<Categorical>(d);
        os << "categorical(";
        for (std::size_t i = 0; i < c.labels.size(); ++i) os << (i ? "," : "") << c.labels[i];
        os << ")";
    }
    return os.str();
}

/// Parse "normal(0,0.2)", "uniform(a,b)", "triangular(a,m,b)",
/// "discrete(v1,...)", "categorical(l1,...)" or "pool(k)".
inline Distribution parse_distribution(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw InvalidDistribution("cannot parse distribution '" + text + "'");
    std::string kind = text.substr(0, open);
    kind.erase(0, kind.find_first_not_of(" \t"));
    kind.erase(kind.find_last_not_of(" \t") + 1);
    std::vector<std::string> args;
    {
        std::string body = text.substr(open + 1, close - open - 1);
        std::string cur;
        for (char c : body) {
            if (c == ',') {
                args.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                cur += c;
            }
        }
        if (!cur.empty() || !args.empty()) args.push_back(cur);
    }
    auto num = [&](std::size_t i) {
        try {
            return std::stod(args.at(i));
        } catch (const std::exception&) {
            throw InvalidDistribution("bad numeric argument in '" + text + "'");
        }
    };
    Distribution d;
    if (kind == "normal") {
        if (args.size() != 2) throw InvalidDistribution("normal(mu,sigma) takes 2 arguments");
        d = Normal{num(0), num(1)};
    } else if (kind == "uniform") {
        if (args.size() != 2) throw InvalidDistribution("uniform(a,b) takes 2 arguments");
        d = Uniform{num(0), num(1)};
    } else if (kind == "triangular") {
        if (args.size() != 3) throw InvalidDistribution("triangular(a,mode,b) takes 3 arguments");
        d = Triangular{num(0), num(1), num(2)};
    } else if (kind == "discrete") {
        DiscreteUniform du;
        for (std::size_t i = 0; i < args.size(); ++i) du.values.push_back(num(i));
        d = du;
    } else if (kind == "categorical") {
        d = Categorical{args};
    } else if (kind == "pool") {
        if (args.size() != 1) throw InvalidDistribution("pool(k) takes 1 argument");
        const int k = static_cast<int>(num(0));
        DiscreteUniform du;
        for (int i = 0; i < k; ++i) du.values.push_back(static_cast<double>(i));
        d = du;
    } else {
        throw InvalidDistribution("unknown distribution kind '" + kind + "'");
    }
    validate(d, text);
    return d;
}

}  // namespace swegsa::gsa

#include "hampath/timegrid.hpp"

#include <cmath>

#include "hampath/errors.hpp"
#include "json.hpp"

namespace hampath {

TimeGrid::TimeGrid(double t_end, int n) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw InvalidParameter("time grid needs t_end > 0, got " + std::to_string(t_end));
    }
    if (n < 1) {
        throw InvalidParameter("time grid needs n >= 1 cells, got " + std::to_string(n));
    }
    Data d{t_end, n, std::vector<double>(static_cast<std::size_t>(n)),
           std::vector<double>(static_cast<std::size_t>(n), t_end / n)};
    const double h = t_end / n;
    for (int i = 0; i < n; ++i) {
        d.nodes[static_cast<std::size_t>(i)] = (i + 0.5) * h;
    }
    data_ = std::make_shared<const Data>(std::move(d));
}

TimeGrid build_grid(double t_end, int n) { return TimeGrid(t_end, n); }

DiscreteFunction::DiscreteFunction(TimeGrid grid)
    : grid_(std::move(grid)), values_(Eigen::VectorXcd::Zero(grid_.n())) {}

DiscreteFunction::DiscreteFunction(TimeGrid grid, Eigen::VectorXcd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.n()) {
        throw InvalidParameter("discrete function has " + std::to_string(values_.size()) +
                               " values on a grid of " + std::to_string(grid_.n()) + " cells");
    }
}

DiscreteFunction& DiscreteFunction::operator+=(const DiscreteFunction& other) {
    if (!(grid_ == other.grid_)) throw GridMismatch();
    values_ += other.values_;
    return *this;
}

PhaseFunction::PhaseFunction(const TimeGrid& grid) : fx_(grid), fp_(grid) {}

PhaseFunction::PhaseFunction(DiscreteFunction fx, DiscreteFunction fp)
    : fx_(std::move(fx)), fp_(std::move(fp)) {
    if (!(fx_.grid() == fp_.grid())) throw GridMismatch();
}

PhaseFunction PhaseFunction::position(DiscreteFunction fx) {
    DiscreteFunction zero(fx.grid());
    return PhaseFunction(std::move(fx), std::move(zero));
}

PhaseFunction PhaseFunction::momentum(DiscreteFunction fp) {
    DiscreteFunction zero(fp.grid());
    return PhaseFunction(std::move(zero), std::move(fp));
}

PhaseFunction& PhaseFunction::operator+=(const PhaseFunction& other) {
    fx_ += other.fx_;
    fp_ += other.fp_;
    return *this;
}

DiscreteFunction indicator(const TimeGrid& grid, double a, double b) {
    if (a > b) {
        throw InvalidParameter("indicator interval [a, b) needs a <= b");
    }
    Eigen::VectorXcd v(grid.n());
    for (int i = 0; i < grid.n(); ++i) {
        const double s = grid.node(i);
        v[i] = (a <= s && s < b) ? 1.0 : 0.0;
    }
    return DiscreteFunction(grid, std::move(v));
}

cplx pair(const DiscreteFunction& f, const DiscreteFunction& g) {
    if (!(f.grid() == g.grid())) throw GridMismatch();
    // uniform weights
    return f.grid().step() * f.values().cwiseProduct(g.values()).sum();
}

cplx pair(const PhaseFunction& f, const PhaseFunction& g) {
    return pair(f.fx(), g.fx()) + pair(f.fp(), g.fp());
}

double norm_squared(const PhaseFunction& f) {
    return f.grid().step() * (f.fx().values().squaredNorm() + f.fp().values().squaredNorm());
}

void TestFunctionSpec::validate() const {
    for (const auto& term : terms) {
        if (!(term.b > 0.0)) {
            throw InvalidParameter("test function bump needs width parameter b > 0");
        }
    }
}

cplx TestFunctionSpec::operator()(double s) const {
    cplx sum = 0.0;
    for (const auto& term : terms) {
        const double d = s - term.c;
        sum += term.a * std::exp(-term.b * d * d);
    }
    return sum;
}

DiscreteFunction sample_test_function(const TimeGrid& grid, const TestFunctionSpec& spec) {
    spec.validate();
    Eigen::VectorXcd v(grid.n());
    for (int i = 0; i < grid.n(); ++i) v[i] = spec(grid.node(i));
    return DiscreteFunction(grid, std::move(v));
}

TestFunctionSpec parse_test_function_spec(std::string_view json_text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidParameter(std::string("test function spec is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("terms") || !doc["terms"].is_array()) {
        throw InvalidParameter("test function spec needs a \"terms\" array");
    }
    TestFunctionSpec spec;
    for (const auto& t : doc["terms"]) {
        GaussianBump bump;
        try {
            bump.a = cplx(t.value("a_re", 0.0), t.value("a_im", 0.0));
            bump.b = t.at("b").get<double>();
            bump.c = t.value("c", 0.0);
        } catch (const json::exception& e) {
            throw InvalidParameter(std::string("malformed test function term: ") + e.what());
        }
        spec.terms.push_back(bump);
    }
    spec.validate();
    return spec;
}

std::string to_json(const TestFunctionSpec& spec) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : spec.terms) {
        terms.push_back({{"a_re", t.a.real()}, {"a_im", t.a.imag()}, {"b", t.b}, {"c", t.c}});
    }
    return nlohmann::json{{"terms", terms}}.dump();
}

}  // namespace hampath

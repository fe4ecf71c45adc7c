#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hampath {

using cplx = std::complex<double>;

/// Uniform midpoint discretization of the half-open interval [0, t_end).
///
/// Cell i covers [i h, (i+1) h) with h = t_end / n; its node is the cell
/// midpoint and its weight the cell width. Copies share the node storage.
class TimeGrid {
public:
    TimeGrid(double t_end, int n);

    double t_end() const noexcept { return data_->t_end; }
    int n() const noexcept { return data_->n; }
    double step() const noexcept { return data_->t_end / data_->n; }
    const std::vector<double>& nodes() const noexcept { return data_->nodes; }
    const std::vector<double>& weights() const noexcept { return data_->weights; }
    double node(int i) const { return data_->nodes[static_cast<std::size_t>(i)]; }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
        return a.data_ == b.data_ || (a.t_end() == b.t_end() && a.n() == b.n());
    }

private:
    struct Data {
        double t_end;
        int n;
        std::vector<double> nodes;
        std::vector<double> weights;
    };
    std::shared_ptr<const Data> data_;
};

TimeGrid build_grid(double t_end, int n);

/// Complex nodal values on a TimeGrid.
class DiscreteFunction {
public:
    explicit DiscreteFunction(TimeGrid grid);  // zero function
    DiscreteFunction(TimeGrid grid, Eigen::VectorXcd values);

    const TimeGrid& grid() const noexcept { return grid_; }
    const Eigen::VectorXcd& values() const noexcept { return values_; }
    cplx operator[](int i) const { return values_[i]; }

    DiscreteFunction& operator+=(const DiscreteFunction& other);
    friend DiscreteFunction operator+(DiscreteFunction a, const DiscreteFunction& b) { return a += b; }
    friend DiscreteFunction operator*(cplx alpha, DiscreteFunction f) {
        f.values_ *= alpha;
        return f;
    }

private:
    TimeGrid grid_;
    Eigen::VectorXcd values_;
};

/// A pair (f_x, f_p) of functions on one grid: the position and momentum
/// slots of the two-component white noise.
class PhaseFunction {
public:
    explicit PhaseFunction(const TimeGrid& grid);  // zero in both slots
    PhaseFunction(DiscreteFunction fx, DiscreteFunction fp);

    static PhaseFunction position(DiscreteFunction fx);
    static PhaseFunction momentum(DiscreteFunction fp);

    const TimeGrid& grid() const noexcept { return fx_.grid(); }
    const DiscreteFunction& fx() const noexcept { return fx_; }
    const DiscreteFunction& fp() const noexcept { return fp_; }

    PhaseFunction& operator+=(const PhaseFunction& other);
    friend PhaseFunction operator+(PhaseFunction a, const PhaseFunction& b) { return a += b; }
    friend PhaseFunction operator*(cplx alpha, const PhaseFunction& f) {
        return PhaseFunction(alpha * f.fx_, alpha * f.fp_);
    }

private:
    DiscreteFunction fx_;
    DiscreteFunction fp_;
};

/// Indicator of [a, b): one at nodes with a <= node < b.
DiscreteFunction indicator(const TimeGrid& grid, double a, double b);

/// Bilinear (unconjugated) midpoint pairing  sum_i w_i f_i g_i.
cplx pair(const DiscreteFunction& f, const DiscreteFunction& g);
cplx pair(const PhaseFunction& f, const PhaseFunction& g);

/// sum_i w_i |f_i|^2, the squared L2 norm.
double norm_squared(const PhaseFunction& f);

/// A finite sum of Gaussian bumps  sum_j a_j exp(-b_j (s - c_j)^2).
struct GaussianBump {
    cplx a{1.0, 0.0};
    double b = 1.0;
    double c = 0.0;
};

struct TestFunctionSpec {
    std::vector<GaussianBump> terms;

    void validate() const;
    cplx operator()(double s) const;
};

DiscreteFunction sample_test_function(const TimeGrid& grid, const TestFunctionSpec& spec);

/// Parses `{"terms":[{"a_re":..,"a_im":..,"b":..,"c":..},...]}`.
TestFunctionSpec parse_test_function_spec(std::string_view json_text);
std::string to_json(const TestFunctionSpec& spec);

}  // namespace hampath

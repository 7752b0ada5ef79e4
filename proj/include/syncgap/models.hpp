#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <string_view>

namespace syncgap {

using State3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

// Hindmarsh-Rose neuron, chaotic bursting regime by default.
struct HindmarshRoseParams {
    double a1 = 3.01;
    double a2 = 0.006;
    double s = 4.0;
    double I = 3.2;
    double x_rest = -1.6;
};

// Roessler oscillator, chaotic by default.
struct RoesslerParams {
    double a1 = 0.2;
    double a2 = 0.2;
    double a3 = 9.0;
};

enum class ModelKind { hindmarsh_rose, roessler };

/// Local node dynamics f : R^3 -> R^3.
class ModelSpec {
public:
    static ModelSpec hindmarsh_rose(const HindmarshRoseParams& p = {});
    static ModelSpec roessler(const RoesslerParams& p = {});
    // Accepts "hindmarsh_rose" / "hr" and "roessler" / "rossler"; throws InputError.
    static ModelSpec from_name(std::string_view name);

    ModelKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept;
    static constexpr int dimension = 3;

    std::map<std::string, double> params() const;
    // Throws InputError for an unknown parameter name.
    void set_param(std::string_view name, double value);

    State3 vector_field(const State3& x) const;
    Matrix3 jacobian(const State3& x) const;

    // Fixed starting point for transients; lies in the basin of the attractor.
    State3 reference_state() const;

private:
    ModelSpec(ModelKind kind) : kind_(kind) {}

    ModelKind kind_;
    HindmarshRoseParams hr_;
    RoesslerParams ro_;
};

inline State3 vector_field(const ModelSpec& model, const State3& x) { return model.vector_field(x); }

/// Linear coupling function H(x) = H x; Gamma = DH(0) = H.
struct CouplingSpec {
    Matrix3 H = Matrix3::Identity();

    const Matrix3& gamma() const noexcept { return H; }

    static CouplingSpec identity() { return {Matrix3::Identity()}; }
    // Coupling through the first component only.
    static CouplingSpec first_component() {
        CouplingSpec c;
        c.H = Matrix3::Zero();
        c.H(0, 0) = 1.0;
        return c;
    }
    // "identity", "x", or 9 comma/semicolon-separated numbers in row-major order.
    static CouplingSpec parse(std::string_view text);
};

} // namespace syncgap

#include "syncgap/models.hpp"

#include "syncgap/error.hpp"

#include <charconv>
#include <vector>

namespace syncgap {

ModelSpec ModelSpec::hindmarsh_rose(const HindmarshRoseParams& p) {
    ModelSpec m(ModelKind::hindmarsh_rose);
    m.hr_ = p;
    return m;
}

ModelSpec ModelSpec::roessler(const RoesslerParams& p) {
    ModelSpec m(ModelKind::roessler);
    m.ro_ = p;
    return m;
}

ModelSpec ModelSpec::from_name(std::string_view name) {
    if (name == "hindmarsh_rose" || name == "hr") return hindmarsh_rose();
    if (name == "roessler" || name == "rossler") return roessler();
    throw InputError("unknown model '" + std::string(name) + "' (expected hindmarsh_rose or roessler)");
}

std::string_view ModelSpec::name() const noexcept {
    return kind_ == ModelKind::hindmarsh_rose ? "hindmarsh_rose" : "roessler";
}

std::map<std::string, double> ModelSpec::params() const {
    if (kind_ == ModelKind::hindmarsh_rose)
        return {{"a1", hr_.a1}, {"a2", hr_.a2}, {"s", hr_.s}, {"I", hr_.I}, {"x_R", hr_.x_rest}};
    return {{"a1", ro_.a1}, {"a2", ro_.a2}, {"a3", ro_.a3}};
}

void ModelSpec::set_param(std::string_view name, double value) {
    double* slot = nullptr;
    if (kind_ == ModelKind::hindmarsh_rose) {
        if (name == "a1") slot = &hr_.a1;
        else if (name == "a2") slot = &hr_.a2;
        else if (name == "s") slot = &hr_.s;
        else if (name == "I") slot = &hr_.I;
        else if (name == "x_R") slot = &hr_.x_rest;
    } else {
        if (name == "a1") slot = &ro_.a1;
        else if (name == "a2") slot = &ro_.a2;
        else if (name == "a3") slot = &ro_.a3;
    }
    if (!slot) throw InputError("model " + std::string(this->name()) + " has no parameter '" + std::string(name) + "'");
    *slot = value;
}

State3 ModelSpec::vector_field(const State3& v) const {
    const double x = v[0], y = v[1], z = v[2];
    if (kind_ == ModelKind::hindmarsh_rose) {
        const auto& p = hr_;
        return {y + p.a1 * x * x - x * x * x - z + p.I,
                1.0 - 5.0 * x * x - y,
                p.a2 * (p.s * (x - p.x_rest) - z)};
    }
    const auto& p = ro_;
    return {-y - z, x + p.a1 * y, p.a2 + z * (x - p.a3)};
}

Matrix3 ModelSpec::jacobian(const State3& v) const {
    const double x = v[0], z = v[2];
    Matrix3 j;
    if (kind_ == ModelKind::hindmarsh_rose) {
        const auto& p = hr_;
        j << 2.0 * p.a1 * x - 3.0 * x * x, 1.0, -1.0,
             -10.0 * x, -1.0, 0.0,
             p.a2 * p.s, 0.0, -p.a2;
        return j;
    }
    const auto& p = ro_;
    j << 0.0, -1.0, -1.0,
         1.0, p.a1, 0.0,
         z, 0.0, x - p.a3;
    return j;
}

State3 ModelSpec::reference_state() const {
    if (kind_ == ModelKind::hindmarsh_rose) return {-1.0, -5.0, 3.0};
    return {1.0, 1.0, 0.0};
}

CouplingSpec CouplingSpec::parse(std::string_view text) {
    if (text == "identity" || text == "I") return identity();
    if (text == "x" || text == "first") return first_component();
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find_first_of(",; ", pos);
        if (end == std::string_view::npos) end = text.size();
        const auto tok = text.substr(pos, end - pos);
        if (!tok.empty()) {
            double d = 0.0;
            const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), d);
            if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size())
                throw InputError("cannot parse coupling entry '" + std::string(tok) + "'");
            v.push_back(d);
        }
        pos = end + 1;
    }
    if (v.size() != 9) throw InputError("coupling matrix needs 9 entries, got " + std::to_string(v.size()));
    CouplingSpec c;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) c.H(i, k) = v[static_cast<std::size_t>(3 * i + k)];
    return c;
}

} // namespace syncgap

#include "qnls/scalar_rhp.hpp"

#include <cmath>

#include <json.hpp>

#include "qnls/cauchy.hpp"
#include "qnls/errors.hpp"

namespace qnls {

QuadGrid Contour::discretize(int panels_per_segment, int order) const {
    QuadGrid g;
    for (const Segment& s : segments) {
        if (s.kind == Segment::Kind::Line) {
            // scale panel count with segment length so long runs stay resolved
            const double len = std::abs(s.end - s.start);
            const int np = std::max(2, static_cast<int>(std::ceil(
                                           panels_per_segment * std::min(1.0, len / 4.0))));
            g.append(gauss_panels(s.start, s.end, np, order));
        } else {
            g.append(gauss_arc(s.center, s.radius, s.theta0, s.theta1,
                               std::max(2, panels_per_segment / 3), order));
        }
    }
    return g;
}

Contour Contour::real_line(double half_width) {
    Contour c;
    Segment s;
    s.kind = Segment::Kind::Line;
    s.start = cd(-half_width);
    s.end = cd(half_width);
    c.segments.push_back(s);
    return c;
}

Contour Contour::deformed(double L1, double L2, double lambda0, double half_width,
                          double radius) {
    if (!(L1 < L2 && L2 < lambda0))
        throw AssumptionError("Contour::deformed: need L1 < L2 < lambda0, got " +
                              std::to_string(L1) + ", " + std::to_string(L2) + ", " +
                              std::to_string(lambda0));
    if (!(radius > 0.0) || L1 - radius < -half_width || L2 + radius > lambda0)
        throw ConfigError("Contour::deformed: detour radius does not fit");
    if (L2 - L1 < 2.0 * radius)
        throw ConfigError("Contour::deformed: detours overlap");
    Contour c;
    c.detour_radius = radius;
    auto line = [&](cd a, cd b) {
        Segment s;
        s.kind = Segment::Kind::Line;
        s.start = a;
        s.end = b;
        c.segments.push_back(s);
    };
    auto arc = [&](double center, double th0, double th1) {
        Segment s;
        s.kind = Segment::Kind::Arc;
        s.center = cd(center);
        s.radius = radius;
        s.theta0 = th0;
        s.theta1 = th1;
        c.segments.push_back(s);
    };
    line(cd(-half_width), cd(L1 - radius));
    arc(L1, pi, 0.0);          // above the axis
    line(cd(L1 + radius), cd(L2 - radius));
    arc(L2, pi, 2.0 * pi);     // below the axis
    line(cd(L2 + radius), cd(lambda0));
    line(cd(lambda0), cd(half_width));
    return c;
}

std::string Contour::to_json() const {
    nlohmann::json j;
    j["orientation"] = orientation;
    j["detour_radius"] = detour_radius;
    j["segments"] = nlohmann::json::array();
    for (const Segment& s : segments) {
        nlohmann::json e;
        if (s.kind == Segment::Kind::Line) {
            e["kind"] = "line";
            e["start"] = {s.start.real(), s.start.imag()};
            e["end"] = {s.end.real(), s.end.imag()};
        } else {
            e["kind"] = "arc";
            e["center"] = {s.center.real(), s.center.imag()};
            e["radius"] = s.radius;
            e["theta0"] = s.theta0;
            e["theta1"] = s.theta1;
        }
        j["segments"].push_back(e);
    }
    return j.dump();
}

Contour Contour::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Contour c;
    c.orientation = j.value("orientation", 1);
    c.detour_radius = j.value("detour_radius", 0.0);
    for (const auto& e : j.at("segments")) {
        Segment s;
        if (e.at("kind") == "line") {
            s.kind = Segment::Kind::Line;
            s.start = cd(e.at("start")[0], e.at("start")[1]);
            s.end = cd(e.at("end")[0], e.at("end")[1]);
        } else {
            s.kind = Segment::Kind::Arc;
            s.center = cd(e.at("center")[0], e.at("center")[1]);
            s.radius = e.at("radius");
            s.theta0 = e.at("theta0");
            s.theta1 = e.at("theta1");
        }
        c.segments.push_back(s);
    }
    return c;
}

cd jump_det(const FieldSet& fs, const ThermoState& th, cd mu, cd split_point) {
    const double s = (split_point.real() - mu.real()) >= 0.0 ? 1.0 : -1.0;
    const cd theta = th.theta_at(mu);
    const cd ephi = fs.exp_phi(mu);
    const cd factor = 1.0 - theta * (1.0 + (s > 0.0 ? 1.0 / ephi : ephi));
    return s > 0.0 ? factor : 1.0 / factor;
}

std::vector<cd> log_jump_on_grid(const FieldSet& fs, const ThermoState& th,
                                 const QuadGrid& grid, cd split_point,
                                 double* index_defect) {
    const int n = grid.size();
    std::vector<cd> lnj(n);
    double prev_arg = 0.0;
    for (int i = 0; i < n; ++i) {
        const cd v = jump_det(fs, th, grid.nodes[i], split_point);
        const double av = std::abs(v);
        if (av < 1e-12)
            throw AccuracyError(
                "log_jump_on_grid: jump determinant vanishes on the contour near mu=" +
                std::to_string(grid.nodes[i].real()) +
                "; deform the contour around the real roots");
        double arg = std::arg(v);
        // continuous branch: unwrap against the previous node
        double k = std::round((prev_arg - arg) / (2.0 * pi));
        arg += 2.0 * pi * k;
        lnj[i] = cd(std::log(av), arg);
        prev_arg = arg;
    }
    // zero-index condition: the argument must return to 0 at both ends
    const double defect = std::max(std::abs(lnj.front().imag()), std::abs(lnj.back().imag()));
    if (index_defect) *index_defect = defect;
    return lnj;
}

cd delta_solution(const FieldSet& fs, const ThermoState& th, const QuadGrid& grid,
                  cd split_point, cd lambda) {
    double defect = 0.0;
    std::vector<cd> lnj = log_jump_on_grid(fs, th, grid, split_point, &defect);
    if (defect > 1e-6)
        throw AssumptionError("delta_solution: nonzero index, arg defect " +
                              std::to_string(defect));
    return std::exp(cauchy_eval(lnj, grid, lambda));
}

namespace {

// ln(1 - theta(mu)(1 + e^{s phi(mu)})) with principal branch; the factor
// stays in the right half plane for admissible configurations, the caller
// tracks continuity where that matters
cd log_factor(const FieldSet& fs, const ThermoState& th, cd mu, double s) {
    const cd theta = th.theta_at(mu);
    const cd ephi = fs.exp_phi(mu);
    return std::log(1.0 - theta * (1.0 + (s > 0.0 ? ephi : 1.0 / ephi)));
}

struct WeightedSums {
    cd plain = 0.0;   // \int f
    cd moment = 0.0;  // \int mu f
};

WeightedSums integrate_factor(const FieldSet& fs, const ThermoState& th,
                              const QuadGrid& g, double phi_sign) {
    WeightedSums s;
    for (int i = 0; i < g.size(); ++i) {
        const cd f = log_factor(fs, th, g.nodes[i], phi_sign);
        s.plain += g.weights[i] * f;
        s.moment += g.weights[i] * g.nodes[i] * f;
    }
    return s;
}

}  // namespace

DeltaExpansion delta_coeffs(const FieldSet& fs, const ThermoState& th,
                            const QuadGrid& grid, cd split_point) {
    const double L = std::max(std::abs(grid.nodes.front()), std::abs(grid.nodes.back()));
    const double xs = split_point.real();
    const int order = grid.order > 0 ? grid.order : 16;
    const int half_panels =
        std::max(8, static_cast<int>(grid.nodes.size()) / (2 * std::max(order, 1)));
    // left of the split the phi-exponent carries sign -, right of it sign +
    WeightedSums left =
        integrate_factor(fs, th, gauss_panels(cd(-L), cd(xs), half_panels, order), -1.0);
    WeightedSums right =
        integrate_factor(fs, th, gauss_panels(cd(xs), cd(L), half_panels, order), +1.0);
    cd d0 = left.plain - right.plain;
    cd d1 = left.moment - right.moment;
    if (std::abs(split_point.imag()) > 0.0) {
        // straight connector Re(split) -> split, traversed on both sides
        QuadGrid conn = gauss_panels(cd(xs), split_point, 8, order);
        WeightedSums cminus = integrate_factor(fs, th, conn, -1.0);
        WeightedSums cplus = integrate_factor(fs, th, conn, +1.0);
        d0 += cminus.plain + cplus.plain;
        d1 += cminus.moment + cplus.moment;
    }
    DeltaExpansion out;
    out.delta0 = d0 / (2.0 * pi * iu);
    out.delta1 = d1 / (2.0 * pi * iu);
    return out;
}

DeltaExpansion delta_coeffs_on_contour(const FieldSet& fs, const ThermoState& th,
                                       const Contour& contour, cd split_point,
                                       int panels_per_segment, int order) {
    const double xs = split_point.real();
    cd d0 = 0.0, d1 = 0.0;
    for (const Contour::Segment& seg : contour.segments) {
        std::vector<QuadGrid> parts;
        if (seg.kind == Contour::Segment::Kind::Line) {
            // keep the sign switch on a panel edge
            if (seg.start.real() < xs && xs < seg.end.real() &&
                std::abs(seg.start.imag()) < 1e-14 && std::abs(seg.end.imag()) < 1e-14) {
                parts.push_back(gauss_panels(seg.start, cd(xs), panels_per_segment, order));
                parts.push_back(gauss_panels(cd(xs), seg.end, panels_per_segment, order));
            } else {
                parts.push_back(gauss_panels(seg.start, seg.end, panels_per_segment, order));
            }
        } else {
            parts.push_back(gauss_arc(seg.center, seg.radius, seg.theta0, seg.theta1,
                                      std::max(2, panels_per_segment / 2), order));
        }
        for (const QuadGrid& g : parts)
            for (int i = 0; i < g.size(); ++i) {
                const double s = (xs - g.nodes[i].real()) >= 0.0 ? 1.0 : -1.0;
                const cd f = s * log_factor(fs, th, g.nodes[i], -s);
                d0 += g.weights[i] * f;
                d1 += g.weights[i] * g.nodes[i] * f;
            }
    }
    if (std::abs(split_point.imag()) > 0.0) {
        QuadGrid conn = gauss_panels(cd(xs), split_point, 8, order);
        WeightedSums cminus = integrate_factor(fs, th, conn, -1.0);
        WeightedSums cplus = integrate_factor(fs, th, conn, +1.0);
        d0 += cminus.plain + cplus.plain;
        d1 += cminus.moment + cplus.moment;
    }
    DeltaExpansion out;
    out.delta0 = d0 / (2.0 * pi * iu);
    out.delta1 = d1 / (2.0 * pi * iu);
    return out;
}

}  // namespace qnls

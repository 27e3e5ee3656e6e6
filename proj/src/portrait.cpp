#include "vircomp/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vircomp/errors.hpp"
#include "vircomp/io.hpp"

namespace vircomp {

namespace {

constexpr std::size_t kMaxPathPoints = 500;

SeedPath to_path(const BundleMember& m) {
    SeedPath path;
    path.seed = m.init;
    if (!m.ok()) {
        path.error = m.error;
        path.points = {m.init};
        return path;
    }
    const auto& states = m.trajectory->states;
    const std::size_t stride = std::max<std::size_t>(1, (states.size() + kMaxPathPoints - 1) / kMaxPathPoints);
    for (std::size_t i = 0; i < states.size(); i += stride) path.points.push_back(states[i].state);
    if ((states.size() - 1) % stride != 0) path.points.push_back(states.back().state);
    path.ok = true;
    return path;
}

}  // namespace

std::vector<State> portrait_seeds(const PortraitSpec& spec) {
    std::vector<State> seeds;
    const auto n = static_cast<double>(spec.seed_resolution);
    for (std::size_t j = 0; j < spec.seed_resolution; ++j) {
        for (std::size_t i = 0; i < spec.seed_resolution; ++i) {
            seeds.push_back({spec.va_max * (static_cast<double>(i) + 0.5) / n,
                             spec.vb_max * (static_cast<double>(j) + 0.5) / n});
        }
    }
    return seeds;
}

PortraitData phase_portrait(const Phenotype& p, const std::optional<Efficacy>& e, double u, const PortraitSpec& spec,
                            StepMethod method) {
    p.validate();
    spec.validate();
    if (!e && u != 0.0) throw ValidationError("a nonzero control needs treatment efficacies");
    if (e) e->validate();

    PortraitData data;
    data.spec = spec;
    data.u = u;
    const Dynamics dyn{p, e.value_or(Efficacy{})};
    data.arrows = arrow_field(dyn, u, spec.va_max, spec.vb_max, spec.arrow_resolution, spec.arrow_resolution);

    const TimeGrid grid{0.0, spec.horizon, spec.dt};
    grid.validate();
    const std::vector<double> schedule(grid.intervals(), u);
    const std::vector<State> seeds = portrait_seeds(spec);
    for (const BundleMember& m : integrate_bundle(method, dyn, schedule, grid, seeds, CostWeights::for_phenotype(p))) {
        data.bundle.push_back(to_path(m));
    }

    data.equilibria = e ? equilibria_constant_control(p, *e, u) : equilibria_free(p);
    return data;
}

std::string portrait_csv(const PortraitData& data) {
    std::string out = "# arrows\nv_a,v_b,dir_a,dir_b,magnitude\n";
    for (const Arrow& a : data.arrows) {
        out += format_double(a.v_a) + ',' + format_double(a.v_b) + ',' + format_double(a.dir_a) + ',' +
               format_double(a.dir_b) + ',' + format_double(a.magnitude) + '\n';
    }
    out += "# trajectories\nseed,ok,v_a,v_b\n";
    for (std::size_t k = 0; k < data.bundle.size(); ++k) {
        const SeedPath& path = data.bundle[k];
        for (const State& s : path.points) {
            out += std::to_string(k) + ',' + (path.ok ? "1" : "0") + ',' + format_double(s.v_a) + ',' +
                   format_double(s.v_b) + '\n';
        }
    }
    out += "# equilibria\nlabel,v_a,v_b,lambda1,lambda2,verdict,in_biological_domain\n";
    for (const EquilibriumReport& r : data.equilibria) {
        out += r.label + ',' + format_double(r.point.v_a) + ',' + format_double(r.point.v_b) + ',' +
               format_double(r.eigenvalues.first) + ',' + format_double(r.eigenvalues.second) + ',' +
               to_string(r.verdict) + ',' + (r.in_biological_domain ? "1" : "0") + '\n';
    }
    return out;
}

namespace {

const char* verdict_color(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "#1a9850";
        case Verdict::Unstable: return "#d73027";
        case Verdict::Marginal: return "#fdae61";
        case Verdict::LineDegenerate: return "#762a83";
    }
    return "#000000";
}

}  // namespace

std::string portrait_svg(const PortraitData& data) {
    constexpr double kSize = 600.0;
    constexpr double kMargin = 50.0;
    const double plot = kSize - 2.0 * kMargin;
    const PortraitSpec& spec = data.spec;
    auto sx = [&](double v_a) { return kMargin + plot * v_a / spec.va_max; };
    auto sy = [&](double v_b) { return kMargin + plot * (1.0 - v_b / spec.vb_max); };
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(6);
        s << v;
        return s.str();
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kSize << "\" height=\"" << kSize
        << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
        << "<defs><marker id=\"head\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\">"
        << "<path d=\"M0,0 L6,3 L0,6 z\" fill=\"#888888\"/></marker>"
        << "<clipPath id=\"window\"><rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << plot
        << "\" height=\"" << plot << "\"/></clipPath></defs>\n"
        << "<rect class=\"frame\" x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << plot << "\" height=\""
        << plot << "\" fill=\"none\" stroke=\"#000000\"/>\n"
        << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 15 << "\" text-anchor=\"middle\">V_A (0 to "
        << num(spec.va_max) << ")</text>\n"
        << "<text x=\"15\" y=\"" << kSize / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << kSize / 2
        << ")\">V_B (0 to " << num(spec.vb_max) << ")</text>\n"
        << "<text x=\"" << kSize / 2 << "\" y=\"30\" text-anchor=\"middle\">u = " << num(data.u) << "</text>\n";

    const double arrow_len = 0.6 * plot / static_cast<double>(std::max<std::size_t>(2, spec.arrow_resolution));
    svg << "<g class=\"arrows\" stroke=\"#888888\" stroke-width=\"1\">\n";
    for (const Arrow& a : data.arrows) {
        if (a.magnitude == 0.0) continue;
        const double x0 = sx(a.v_a);
        const double y0 = sy(a.v_b);
        svg << "<line class=\"arrow\" x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\""
            << num(x0 + arrow_len * a.dir_a) << "\" y2=\"" << num(y0 - arrow_len * a.dir_b)
            << "\" marker-end=\"url(#head)\"/>\n";
    }
    svg << "</g>\n<g class=\"bundle\" fill=\"none\" stroke-width=\"1.5\" clip-path=\"url(#window)\">\n";
    for (const SeedPath& path : data.bundle) {
        svg << "<polyline class=\"" << (path.ok ? "trajectory" : "trajectory failed") << "\" stroke=\""
            << (path.ok ? "#2166ac" : "#bbbbbb") << "\" points=\"";
        for (std::size_t i = 0; i < path.points.size(); ++i) {
            if (i) svg << ' ';
            svg << num(sx(path.points[i].v_a)) << ',' << num(sy(path.points[i].v_b));
        }
        svg << "\"/>\n";
    }
    svg << "</g>\n<g class=\"equilibria\">\n";
    for (const EquilibriumReport& r : data.equilibria) {
        if (r.line) {
            svg << "<line class=\"equilibrium-line\" x1=\"" << num(sx(r.line->intercept)) << "\" y1=\"" << num(sy(0.0))
                << "\" x2=\"" << num(sx(0.0)) << "\" y2=\"" << num(sy(r.line->intercept)) << "\" stroke=\""
                << verdict_color(r.verdict) << "\" stroke-dasharray=\"4 3\"/>\n";
        }
        svg << "<circle class=\"equilibrium " << to_string(r.verdict) << "\" cx=\"" << num(sx(r.point.v_a))
            << "\" cy=\"" << num(sy(r.point.v_b)) << "\" r=\"5\" fill=\"" << verdict_color(r.verdict)
            << "\" stroke=\"#000000\"><title>" << r.label << " (" << to_string(r.verdict) << ")</title></circle>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

}  // namespace vircomp

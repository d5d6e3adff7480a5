#include "orra/figures.hpp"

#include "orra/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace orra::harness {

namespace {

constexpr std::size_t kMaxPoints = 1500;

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

std::size_t agents_of(const Trace& trace) {
    return static_cast<std::size_t>(trace.meta_number("agents"));
}

std::vector<std::filesystem::path> emit(const std::filesystem::path& dir, const std::string& id,
                                        const std::string& title, const std::string& x_name,
                                        const std::string& value_name, const std::vector<Series>& s) {
    const auto csv = dir / (id + ".csv");
    const auto svg = dir / (id + ".svg");
    write_tidy_csv(csv, id, x_name, value_name, s);
    write_text(svg, svg_line_chart(title, x_name, value_name, downsample(s, kMaxPoints)));
    return {csv, svg};
}

}  // namespace

std::vector<Series> downsample(const std::vector<Series>& series, std::size_t max_points) {
    std::vector<Series> out;
    for (const auto& s : series) {
        if (s.x.size() <= max_points || max_points < 2) {
            out.push_back(s);
            continue;
        }
        const std::size_t stride = (s.x.size() + max_points - 1) / max_points;
        Series d{s.name, {}, {}};
        for (std::size_t i = 0; i < s.x.size(); i += stride) {
            d.x.push_back(s.x[i]);
            d.y.push_back(s.y[i]);
        }
        if (d.x.back() != s.x.back()) {
            d.x.push_back(s.x.back());
            d.y.push_back(s.y.back());
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
    constexpr double W = 720, H = 420, L = 70, R = 170, T = 40, B = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(title) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
      << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (y0 < 0 && y1 > 0) {
        o << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << py(0) << "\" y2=\"" << py(0)
          << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    o << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << fmt(x0)
      << "</text>\n";
    o << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << fmt(x1)
      << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(y0) << "\" text-anchor=\"end\">" << fmt(y0)
      << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(y1) + 10 << "\" text-anchor=\"end\">" << fmt(y1)
      << "</text>\n";
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
    o << "<text transform=\"translate(16," << (T + H - B) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % std::size(palette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            o << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
        }
        o << "\"/>\n";
        const double ly = T + 14 + 18 * static_cast<double>(k);
        o << "<line x1=\"" << W - R + 12 << "\" x2=\"" << W - R + 32 << "\" y1=\"" << ly - 4
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << W - R + 38 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_tidy_csv(const std::filesystem::path& path, const std::string& figure,
                    const std::string& x_name, const std::string& value_name,
                    const std::vector<Series>& series) {
    std::string out = "# orra-figure schema=" + std::to_string(kTraceSchemaVersion) + " figure=" +
                      figure + "\n" + x_name + ",series," + value_name + "\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out += format_number(s.x[i]) + "," + s.name + "," + format_number(s.y[i]) + "\n";
        }
    }
    write_text(path, out);
}

std::vector<std::filesystem::path> write_fig5(const Trace& trace, const std::filesystem::path& out_dir) {
    const auto t = trace.column("time_s");
    const auto n = agents_of(trace);
    std::vector<Series> power, mc;
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = trace.column("d_" + std::to_string(i));
        const auto c = trace.column("c_" + std::to_string(i));
        Series p{"bess" + std::to_string(i + 1), t, {}};
        for (std::size_t r = 0; r < t.size(); ++r) p.y.push_back(d[r] - c[r]);
        power.push_back(std::move(p));
        mc.push_back({"bess" + std::to_string(i + 1), t, trace.column("mc_" + std::to_string(i))});
    }
    std::vector<Series> cost = {{"distributed", t, trace.column("cost")},
                                {"centralized", t, trace.column("oracle_cost")}};
    auto out = emit(out_dir, "fig5a", "BESS net power", "time_s", "power_mw", power);
    auto b = emit(out_dir, "fig5b", "Marginal cost", "time_s", "marginal_cost_per_mwh", mc);
    auto c = emit(out_dir, "fig5c", "Fleet cost", "time_s", "cost_per_h", cost);
    out.insert(out.end(), b.begin(), b.end());
    out.insert(out.end(), c.begin(), c.end());
    return out;
}

std::vector<std::filesystem::path> write_fig6(const std::vector<Trace>& arms,
                                              const std::vector<std::string>& labels,
                                              const std::filesystem::path& out_dir) {
    if (arms.size() != labels.size()) throw DimensionError("fig6: one label per arm required");
    std::vector<Series> s;
    for (std::size_t k = 0; k < arms.size(); ++k) {
        s.push_back({labels[k], arms[k].column("time_s"), arms[k].column("df1_hz")});
    }
    return emit(out_dir, "fig6", "Area 1 frequency deviation", "time_s", "df_hz", s);
}

std::vector<std::filesystem::path> write_fig7(const Trace& trace, const std::filesystem::path& out_dir) {
    const auto t = trace.column("time_s");
    std::vector<Series> power = {{"disturbance", t, trace.column("disturbance_mw")},
                                 {"bess", t, trace.column("pbess_mw")},
                                 {"agc", t, trace.column("agc1_mw")}};
    std::vector<Series> soc;
    for (std::size_t i = 0; i < agents_of(trace); ++i) {
        soc.push_back({"bess" + std::to_string(i + 1), t, trace.column("soc_" + std::to_string(i))});
    }
    std::vector<Series> freq = {{"df1", t, trace.column("df1_hz")}};
    auto out = emit(out_dir, "fig7", "Fluctuating load: power", "time_s", "power_mw", power);
    auto b = emit(out_dir, "fig7_soc", "Fluctuating load: state of charge", "time_s", "soc", soc);
    auto c = emit(out_dir, "fig7_freq", "Fluctuating load: frequency", "time_s", "df_hz", freq);
    out.insert(out.end(), b.begin(), b.end());
    out.insert(out.end(), c.begin(), c.end());
    return out;
}

}  // namespace orra::harness

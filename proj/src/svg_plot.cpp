#include "ewaldqft/svg_plot.hpp"

#include "ewaldqft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace ewaldqft {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0, hi = 1;

    double t(double v) const { return log ? std::log10(v) : v; }
    double frac(double v) const { return (t(v) - lo) / (hi - lo); }
};

Axis make_axis(std::vector<double> values, bool log)
{
    Axis a;
    a.log = log;
    if (log) values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !(v > 0.0); }), values.end());
    if (values.empty()) return a;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    a.lo = a.t(*mn);
    a.hi = a.t(*mx);
    if (log) {
        a.lo = std::floor(a.lo);
        a.hi = std::ceil(a.hi);
    } else {
        const double pad = 0.05 * (a.hi - a.lo);
        a.lo -= pad;
        a.hi += pad;
    }
    if (a.hi <= a.lo) a.hi = a.lo + 1.0;
    return a;
}

std::string tick_label(double t, bool log)
{
    char buf[32];
    if (log) std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(t)));
    else std::snprintf(buf, sizeof buf, "%.3g", t);
    return buf;
}

/// Mean and sample sd of `column` grouped by N (ascending), over rows that pass `keep`.
template <class Keep>
PlotSeries grouped_series(const CsvTable& t, const std::string& name, const std::string& column, Keep keep)
{
    std::map<double, std::vector<double>> by_n;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        if (keep(r)) by_n[t.number(r, "N")].push_back(t.number(r, column));
    PlotSeries s;
    s.name = name;
    for (const auto& [n, v] : by_n) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        s.x.push_back(n);
        s.y.push_back(mean);
        s.err.push_back(v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0);
    }
    return s;
}

} // namespace

std::string render_svg(const PlotSpec& plot)
{
    std::vector<double> xs, ys;
    for (const auto& s : plot.series) {
        if (s.x.size() != s.y.size() || (!s.err.empty() && s.err.size() != s.y.size()))
            throw ValidationError("plot series '" + s.name + "' has mismatched lengths");
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            ys.push_back(s.y[i]);
            if (!s.err.empty()) {
                ys.push_back(s.y[i] + s.err[i]);
                if (!plot.log_y || s.y[i] - s.err[i] > 0.0) ys.push_back(s.y[i] - s.err[i]);
            }
        }
    }
    if (plot.marker_x) xs.push_back(*plot.marker_x);
    const Axis ax = make_axis(xs, plot.log_x), ay = make_axis(ys, plot.log_y);
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + ax.frac(v) * pw; };
    auto py = [&](double v) { return kTop + (1.0 - ay.frac(v)) * ph; };
    auto ok_x = [&](double v) { return std::isfinite(v) && (!ax.log || v > 0.0); };
    auto ok_y = [&](double v) { return std::isfinite(v) && (!ay.log || v > 0.0); };

    std::string o;
    o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(plot.title) + "</text>\n";
    o += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

    // Ticks: decades on log axes, 5 divisions on linear ones.
    auto ticks = [](const Axis& a) {
        std::vector<double> t;
        if (a.log) {
            const int step = std::max(1, static_cast<int>(std::ceil((a.hi - a.lo) / 10.0)));
            for (double v = a.lo; v <= a.hi + 1e-9; v += step) t.push_back(v);
        } else {
            for (int i = 0; i <= 5; ++i) t.push_back(a.lo + (a.hi - a.lo) * i / 5.0);
        }
        return t;
    };
    for (double t : ticks(ax)) {
        const double x = kLeft + (t - ax.lo) / (ax.hi - ax.lo) * pw;
        o += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
        o += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
             tick_label(t, ax.log) + "</text>\n";
    }
    for (double t : ticks(ay)) {
        const double y = kTop + (1.0 - (t - ay.lo) / (ay.hi - ay.lo)) * ph;
        o += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(y) +
             "\" stroke=\"black\"/>\n";
        o += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" + num(y) +
             "\" stroke=\"#dddddd\"/>\n";
        o += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
             tick_label(t, ay.log) + "</text>\n";
    }
    o += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 16) + "\" text-anchor=\"middle\">" +
         escape(plot.x_label) + "</text>\n";
    o += "<text transform=\"translate(18," + num(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(plot.y_label) + "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const std::string color = kColors[k % std::size(kColors)];
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!ok_x(s.x[i]) || !ok_y(s.y[i])) continue;
            if (!points.empty()) points += ' ';
            points += num(px(s.x[i])) + "," + num(py(s.y[i]));
        }
        o += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" +
             (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + " points=\"" + points + "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!ok_x(s.x[i]) || !ok_y(s.y[i])) continue;
            const double x = px(s.x[i]);
            if (!s.err.empty() && s.err[i] > 0.0) {
                const double hi = s.y[i] + s.err[i];
                const double lo = s.y[i] - s.err[i];
                const double y_hi = py(hi);
                const double y_lo = ok_y(lo) ? py(lo) : kTop + ph;
                o += "<line x1=\"" + num(x) + "\" y1=\"" + num(y_lo) + "\" x2=\"" + num(x) + "\" y2=\"" + num(y_hi) +
                     "\" stroke=\"" + color + "\"/>\n";
            }
            o += "<circle cx=\"" + num(x) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(k);
        o += "<line x1=\"" + num(kLeft + pw + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kLeft + pw + 36) +
             "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"" +
             (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
        o += "<text x=\"" + num(kLeft + pw + 42) + "\" y=\"" + num(ly + 4) + "\">" + escape(s.name) + "</text>\n";
    }

    if (plot.marker_x && ok_x(*plot.marker_x)) {
        const double x = px(*plot.marker_x);
        o += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) + "\" y2=\"" + num(kTop + ph) +
             "\" stroke=\"black\" stroke-dasharray=\"2,3\"/>\n";
        o += "<text x=\"" + num(x + 4) + "\" y=\"" + num(kTop + 14) + "\">" + escape(plot.marker_label) + "</text>\n";
    }
    o += "</svg>\n";
    return o;
}

PlotSpec plot_for(const CsvTable& table)
{
    const Experiment e = detect_experiment(table);
    check_schema(table, e);
    PlotSpec p;
    p.x_label = "N";
    auto all = [](std::size_t) { return true; };
    switch (e) {
    case Experiment::Breakdown:
        p.title = "Ewald term fractions |E^X| / |E|";
        p.y_label = "fraction of total energy";
        p.series.push_back(grouped_series(table, "E^S", "frac_short", all));
        p.series.push_back(grouped_series(table, "E^L", "frac_long", all));
        p.series.push_back(grouped_series(table, "E^self", "frac_self", all));
        p.series.push_back(grouped_series(table, "E^dip", "frac_dip", all));
        break;
    case Experiment::Timing: {
        p.title = "E^L time: classical vs modeled quantum";
        p.y_label = "seconds";
        auto fft = grouped_series(table, "classical (FFT)", "t_fft_mean_s", all);
        auto tq = grouped_series(table, "quantum T_q", "t_q_mean_s", all);
        // Spread over repeats, not over rows.
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            fft.err[i] = table.number(i, "t_fft_sd_s");
            tq.err[i] = table.number(i, "t_q_sd_s");
        }
        p.series = {fft, tq};
        const auto cross = crossover_report(table);
        if (cross.front().n_star) {
            p.marker_x = cross.front().n_star;
            p.marker_label = "N* = " + format_double(*cross.front().n_star);
        }
        break;
    }
    case Experiment::Error: {
        p.title = "Relative error vs shell-converged direct sum";
        p.y_label = "mean relative error";
        std::map<std::string, std::vector<std::size_t>> groups;
        std::vector<std::string> order;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            std::string key = table.text(r, "d") + "d M=" + table.text(r, "M") + " " + table.text(r, "path");
            if (table.text(r, "path") == "qsampled") key += " K=" + table.text(r, "K");
            if (!groups.count(key)) order.push_back(key);
            groups[key].push_back(r);
        }
        for (const auto& key : order) {
            PlotSeries s;
            s.name = key;
            s.dashed = key.rfind("2d", 0) == 0;
            for (auto r : groups[key]) {
                s.x.push_back(table.number(r, "N"));
                s.y.push_back(table.number(r, "mean_rel_err"));
                s.err.push_back(table.number(r, "sd_rel_err"));
            }
            p.series.push_back(std::move(s));
        }
        break;
    }
    }
    return p;
}

std::string render_csv_plot(const CsvTable& table) { return render_svg(plot_for(table)); }

} // namespace ewaldqft

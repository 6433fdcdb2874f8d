#include "cfml/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "cfml/errors.hpp"
#include "cfml/io_util.hpp"

namespace cfml {

namespace {

namespace fs = std::filesystem;

constexpr int kWidth = 820;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 90;

const char* kPalette[] = {"#4c78a8", "#f58518", "#54a24b", "#e45756",
                          "#72b7b2", "#b279a2", "#9d755d", "#bab0ac"};

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

struct SvgBuilder {
    std::ostringstream body;

    std::string finish(const std::string& title) {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
            << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
            << escape_xml(title) << "</text>\n"
            << body.str() << "</svg>\n";
        return out.str();
    }
};

} // namespace

std::string svg_bar_chart(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<double>& values) {
    if (labels.size() != values.size()) throw UsageError("svg_bar_chart: misaligned inputs");
    SvgBuilder svg;
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    double vmax = 0.0, vmin = 0.0;
    for (double v : values) {
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    if (vmax == vmin) vmax = vmin + 1.0;
    auto y_of = [&](double v) { return kMarginTop + plot_h * (1.0 - (v - vmin) / (vmax - vmin)); };

    // axes and gridlines
    for (int i = 0; i <= 4; ++i) {
        const double v = vmin + (vmax - vmin) * i / 4.0;
        const double y = y_of(v);
        svg.body << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y << "\" x2=\""
                 << kWidth - kMarginRight << "\" y2=\"" << y
                 << "\" stroke=\"#ddd\"/>\n<text x=\"" << kMarginLeft - 6 << "\" y=\"" << y + 4
                 << "\" text-anchor=\"end\">" << format_double(v, 3) << "</text>\n";
    }

    const std::size_t n = labels.size();
    const double slot = plot_w / double(std::max<std::size_t>(n, 1));
    const double bar = slot * 0.7;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = kMarginLeft + slot * double(i) + (slot - bar) / 2.0;
        const double y0 = y_of(std::max(0.0, values[i]));
        const double y1 = y_of(std::min(0.0, values[i]));
        svg.body << "<rect x=\"" << x << "\" y=\"" << y0 << "\" width=\"" << bar << "\" height=\""
                 << std::max(1.0, y1 - y0) << "\" fill=\"" << kPalette[i % 8] << "\"/>\n";
        svg.body << "<text x=\"" << x + bar / 2.0 << "\" y=\"" << kHeight - kMarginBottom + 14
                 << "\" text-anchor=\"end\" transform=\"rotate(-35 " << x + bar / 2.0 << ' '
                 << kHeight - kMarginBottom + 14 << ")\">" << escape_xml(labels[i]) << "</text>\n";
    }
    return svg.finish(title);
}

std::string svg_line_chart(const std::string& title, const std::vector<std::string>& series_names,
                           const std::vector<std::vector<double>>& series,
                           const std::string& x_label, const std::string& y_label) {
    if (series_names.size() != series.size()) throw UsageError("svg_line_chart: misaligned inputs");
    SvgBuilder svg;
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    std::size_t len = 0;
    double vmax = -1e300, vmin = 1e300;
    for (const auto& s : series) {
        len = std::max(len, s.size());
        for (double v : s) {
            vmax = std::max(vmax, v);
            vmin = std::min(vmin, v);
        }
    }
    if (len == 0 || vmin > vmax) {
        vmin = 0.0;
        vmax = 1.0;
        len = 1;
    }
    if (vmax == vmin) vmax = vmin + 1.0;
    auto y_of = [&](double v) { return kMarginTop + plot_h * (1.0 - (v - vmin) / (vmax - vmin)); };
    auto x_of = [&](std::size_t i) {
        return len < 2 ? kMarginLeft + plot_w / 2.0
                       : kMarginLeft + plot_w * double(i) / double(len - 1);
    };

    for (int i = 0; i <= 4; ++i) {
        const double v = vmin + (vmax - vmin) * i / 4.0;
        svg.body << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y_of(v) << "\" x2=\""
                 << kWidth - kMarginRight << "\" y2=\"" << y_of(v)
                 << "\" stroke=\"#ddd\"/>\n<text x=\"" << kMarginLeft - 6 << "\" y=\""
                 << y_of(v) + 4 << "\" text-anchor=\"end\">" << format_double(v, 3) << "</text>\n";
    }
    for (std::size_t i = 0; i < len; ++i)
        svg.body << "<text x=\"" << x_of(i) << "\" y=\"" << kHeight - kMarginBottom + 16
                 << "\" text-anchor=\"middle\">" << i + 1 << "</text>\n";
    svg.body << "<text x=\"" << kMarginLeft + plot_w / 2.0 << "\" y=\""
             << kHeight - kMarginBottom + 34 << "\" text-anchor=\"middle\">" << escape_xml(x_label)
             << "</text>\n";
    svg.body << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2.0
             << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kMarginTop + plot_h / 2.0
             << ")\">" << escape_xml(y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        if (series[s].empty()) continue;
        svg.body << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 8]
                 << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < series[s].size(); ++i)
            svg.body << x_of(i) << ',' << y_of(series[s][i]) << ' ';
        svg.body << "\"/>\n";
        const double ly = kMarginTop + 14.0 * double(s);
        svg.body << "<line x1=\"" << kWidth - kMarginRight - 130 << "\" y1=\"" << ly << "\" x2=\""
                 << kWidth - kMarginRight - 110 << "\" y2=\"" << ly << "\" stroke=\""
                 << kPalette[s % 8] << "\" stroke-width=\"2\"/>\n<text x=\""
                 << kWidth - kMarginRight - 105 << "\" y=\"" << ly + 4 << "\">"
                 << escape_xml(series_names[s]) << "</text>\n";
    }
    return svg.finish(title);
}

namespace {

// minimal CSV table reader used only for reporting
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : int(it - header.begin());
    }
};

CsvTable read_csv(const std::string& path) {
    CsvTable table;
    std::istringstream in(read_text_file(path));
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line, ',');
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

std::string md_table(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    out << '|';
    for (const auto& h : header) out << ' ' << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out << " --- |";
    out << '\n';
    for (const auto& row : rows) {
        out << '|';
        for (const auto& cell : row) out << ' ' << cell << " |";
        out << '\n';
    }
    return out.str();
}

} // namespace

void render_charts(const ExperimentConfig& cfg) {
    const fs::path out(cfg.output);

    if (fs::exists(out / "meta_scores.csv")) {
        const CsvTable scores = read_csv((out / "meta_scores.csv").string());
        const int ca = scores.col("meta_approach"), cl = scores.col("metalearner"),
                  cm = scores.col("mean_tau");
        std::vector<std::string> labels;
        std::vector<double> values;
        for (const auto& row : scores.rows) {
            labels.push_back(row[std::size_t(ca)] + "/" + row[std::size_t(cl)]);
            values.push_back(std::stod(row[std::size_t(cm)]));
        }
        atomic_write_text((out / "meta_scores.svg").string(),
                          svg_bar_chart("LOOCV mean Kendall tau", labels, values));
    }

    if (fs::exists(out / "impact.csv")) {
        const CsvTable impact = read_csv((out / "impact.csv").string());
        const int ca = impact.col("meta_approach"), cl = impact.col("metalearner"),
                  cm = impact.col("measure"), cv = impact.col("value");
        std::map<std::string, std::map<std::string, std::vector<double>>> by_measure;
        for (const auto& row : impact.rows)
            by_measure[row[std::size_t(cm)]][row[std::size_t(ca)] + "/" + row[std::size_t(cl)]]
                .push_back(std::stod(row[std::size_t(cv)]));
        for (const auto& [measure, curves] : by_measure) {
            std::vector<std::string> names;
            std::vector<std::vector<double>> series;
            for (const auto& [name, curve] : curves) {
                names.push_back(name);
                series.push_back(curve);
            }
            atomic_write_text((out / ("impact_" + measure + ".svg")).string(),
                              svg_line_chart("Baselevel impact (" + measure + ")", names, series,
                                             "threshold t", measure));
        }
    }
}

void run_report(const ExperimentConfig& cfg) {
    const fs::path out(cfg.output);
    std::ostringstream md;
    md << "# Experiment report\n\n";
    md << "- task: " << task_name(cfg.task) << "\n- datasets: " << cfg.corpus.size()
       << "\n- seed: " << cfg.seed << "\n\n";

    if (fs::exists(out / "performance.csv")) {
        const CsvTable perf = read_csv((out / "performance.csv").string());
        md << "## Baselevel\n\n" << perf.rows.size() << " performance cells in `performance.csv`.\n\n";
    }
    if (fs::exists(out / "alignment.csv")) {
        const CsvTable align = read_csv((out / "alignment.csv").string());
        const int cc = align.col("correlation");
        double worst = 1.0, acc = 0.0;
        for (const auto& row : align.rows) {
            const double v = std::stod(row[std::size_t(cc)]);
            worst = std::min(worst, v);
            acc += v;
        }
        md << "## Metatarget alignment\n\n";
        if (!align.rows.empty())
            md << "mean correlation " << format_double(acc / double(align.rows.size()), 4)
               << ", minimum " << format_double(worst, 4) << ".\n";
        if (fs::exists(out / "alignment_flagged.csv")) {
            const CsvTable flagged = read_csv((out / "alignment_flagged.csv").string());
            md << flagged.rows.size() << " dataset(s) fall below the "
               << format_double(cfg.alignment_flag_threshold, 3) << " threshold.\n";
            if (!flagged.rows.empty()) md << '\n' << md_table(flagged.header, flagged.rows);
        }
        md << '\n';
    }
    if (fs::exists(out / "meta_scores.csv")) {
        const CsvTable scores = read_csv((out / "meta_scores.csv").string());
        md << "## Metalevel accuracy\n\n" << md_table(scores.header, scores.rows) << '\n';
    }
    if (fs::exists(out / "feature_importance.csv")) {
        const CsvTable imp = read_csv((out / "feature_importance.csv").string());
        md << "## Feature importance (top entries)\n\n";
        std::vector<std::vector<std::string>> head(
            imp.rows.begin(),
            imp.rows.begin() + std::min<std::size_t>(imp.rows.size(), 20));
        md << md_table(imp.header, head) << '\n';
    }
    for (const auto& entry : fs::directory_iterator(out)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("cd_", 0) == 0 && entry.path().extension() == ".cd")
            md << "- `" << name << "`: " << read_text_file(entry.path().string());
    }

    atomic_write_text((out / "summary.md").string(), md.str());
    if (cfg.emit_svg) render_charts(cfg);
}

} // namespace cfml

#include "teachlab/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "teachlab/errors.hpp"
#include "teachlab/textio.hpp"
#include "teachlab/train.hpp"

namespace teachlab {

PlotWindow plot_window_from_string(const std::string& s) {
    if (s == "full") return PlotWindow::full;
    if (s == "early") return PlotWindow::early;
    if (s == "late") return PlotWindow::late;
    throw ContractError("unknown plot window '" + s + "'");
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 60.0, kRight = 780.0, kTop = 20.0, kBottom = 460.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Series {
    std::string label;
    std::vector<double> x, y;
};

std::string f2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void plot_loss_curves(const std::vector<std::string>& metrics_files, PlotWindow window,
                      const std::string& out_svg) {
    if (metrics_files.empty()) {
        throw ContractError("plot: at least one metrics file is required");
    }
    std::vector<Series> series;
    for (const auto& path : metrics_files) {
        const auto records = load_metrics(path);
        Series s;
        s.label = std::filesystem::path(path).stem().string();
        std::vector<const RunRecord*> train_rows;
        for (const auto& r : records) {
            if (r.split == "train") train_rows.push_back(&r);
        }
        std::size_t begin = 0, end = train_rows.size();
        if (window == PlotWindow::early) {
            end = 0;
            while (end < train_rows.size() && train_rows[end]->step < 1000) ++end;
        } else if (window == PlotWindow::late) {
            begin = train_rows.size() > 100 ? train_rows.size() - 100 : 0;
        }
        for (std::size_t i = begin; i < end; ++i) {
            s.x.push_back(static_cast<double>(train_rows[i]->step));
            s.y.push_back(train_rows[i]->loss);
        }
        if (s.x.empty()) {
            throw ContractError("plot: no train rows in window for '" + path + "'");
        }
        series.push_back(std::move(s));
    }

    double xmin = series[0].x[0], xmax = xmin, ymin = series[0].y[0], ymax = ymin;
    for (const auto& s : series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const auto sx = [&](double v) {
        return kLeft + (v - xmin) / (xmax - xmin) * (kRight - kLeft);
    };
    const auto sy = [&](double v) {
        return kBottom - (v - ymin) / (ymax - ymin) * (kBottom - kTop);
    };

    std::ofstream out(out_svg, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + out_svg + "' for writing");
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kBottom << "\" stroke=\"black\"/>\n";

    for (int i = 0; i < 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        out << "<text x=\"" << f2(sx(fx)) << "\" y=\"" << f2(kBottom + 16.0)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_double(fx) << "</text>\n";
        out << "<text x=\"" << f2(kLeft - 6.0) << "\" y=\"" << f2(sy(fy) + 4.0)
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_double(fy) << "</text>\n";
        out << "<line x1=\"" << kLeft << "\" y1=\"" << f2(sy(fy)) << "\" x2=\"" << kRight
            << "\" y2=\"" << f2(sy(fy)) << "\" stroke=\"#dddddd\"/>\n";
    }
    out << "<text x=\"" << (kLeft + kRight) / 2.0 << "\" y=\"" << kHeight - 6.0
        << "\" font-size=\"12\" text-anchor=\"middle\">step</text>\n";
    out << "<text x=\"14\" y=\"" << (kTop + kBottom) / 2.0
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << (kTop + kBottom) / 2.0 << ")\">train loss</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t p = 0; p < series[i].x.size(); ++p) {
            if (p) out << " ";
            out << f2(sx(series[i].x[p])) << "," << f2(sy(series[i].y[p]));
        }
        out << "\"/>\n";
        const double ly = kTop + 16.0 * static_cast<double>(i);
        out << "<rect x=\"" << kRight - 150.0 << "\" y=\"" << f2(ly + 2.0)
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << kRight - 136.0 << "\" y=\"" << f2(ly + 11.0)
            << "\" font-size=\"11\">" << series[i].label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) {
        throw IoError("write failure on '" + out_svg + "'");
    }
}

}  // namespace teachlab

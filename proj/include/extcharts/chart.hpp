#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "resolution.hpp"

// Adams-style (t-s, s) charts.  All emitters are pure functions of the
// ChartSpec and byte-deterministic: identical input gives identical output.

namespace extcharts::chart {

enum class Marker { Filled, Open, Box, Diamond };

inline std::string marker_name(Marker m)
{
    switch (m) {
        case Marker::Filled: return "filled";
        case Marker::Open: return "open";
        case Marker::Box: return "box";
        case Marker::Diamond: return "diamond";
    }
    return "filled";
}

inline std::optional<Marker> parse_marker(const std::string& s)
{
    if (s == "filled")
        return Marker::Filled;
    if (s == "open")
        return Marker::Open;
    if (s == "box")
        return Marker::Box;
    if (s == "diamond")
        return Marker::Diamond;
    return std::nullopt;
}

struct DotRef {
    int stem = 0, s = 0;
    uint32_t index = 0;
    bool operator<(const DotRef& o) const
    {
        return std::tie(stem, s, index) < std::tie(o.stem, o.s, o.index);
    }
    bool operator==(const DotRef& o) const
    {
        return stem == o.stem && s == o.s && index == o.index;
    }
};

struct Dot {
    DotRef at;
    Marker marker = Marker::Filled;
    bool operator<(const Dot& o) const
    {
        return at < o.at || (at == o.at && marker < o.marker);
    }
    bool operator==(const Dot& o) const { return at == o.at && marker == o.marker; }
};

enum class LineKind { H0, H1, H2, V1Period, Annotation };

inline std::string line_kind_name(LineKind k)
{
    switch (k) {
        case LineKind::H0: return "h0";
        case LineKind::H1: return "h1";
        case LineKind::H2: return "h2";
        case LineKind::V1Period: return "v1-period";
        case LineKind::Annotation: return "annotation";
    }
    return "annotation";
}

inline std::optional<LineKind> parse_line_kind(const std::string& s)
{
    if (s == "h0")
        return LineKind::H0;
    if (s == "h1")
        return LineKind::H1;
    if (s == "h2")
        return LineKind::H2;
    if (s == "v1-period")
        return LineKind::V1Period;
    if (s == "annotation")
        return LineKind::Annotation;
    return std::nullopt;
}

struct Line {
    LineKind kind = LineKind::Annotation;
    DotRef from, to;
    bool operator<(const Line& o) const
    {
        return std::tie(kind, from, to) < std::tie(o.kind, o.from, o.to);
    }
    bool operator==(const Line& o) const
    {
        return kind == o.kind && from == o.from && to == o.to;
    }
};

struct DifferentialArrow {
    int page = 2;
    DotRef from, to;
    bool operator<(const DifferentialArrow& o) const
    {
        return std::tie(page, from, to) < std::tie(o.page, o.from, o.to);
    }
};

struct ChartSpec {
    std::vector<Dot> dots;
    std::vector<Line> lines;
    std::vector<DifferentialArrow> differentials;

    void normalize()
    {
        std::sort(dots.begin(), dots.end());
        std::sort(lines.begin(), lines.end());
        std::sort(differentials.begin(), differentials.end());
    }

    // every referenced dot must exist
    void validate() const
    {
        std::set<DotRef> have;
        for (const auto& d : dots)
            have.insert(d.at);
        for (const auto& l : lines)
            if (!have.count(l.from) || !have.count(l.to))
                throw ComputeError("chart line references a missing dot");
        for (const auto& d : differentials)
            if (!have.count(d.from) || !have.count(d.to))
                throw ComputeError("chart differential references a missing dot");
    }
};

// One dot per generator; h0/h1/h2 lines from the product ledger; markers
// from the caller's classification (defaults to filled).
inline ChartSpec chart_from_ext(const res::ExtTable& table,
                                const std::vector<res::ExtProductEntry>* products = nullptr,
                                const std::map<DotRef, Marker>* markers = nullptr, int rebase = 0)
{
    ChartSpec spec;
    for (const auto& [st, d] : table.dims) {
        auto [s, t] = st;
        for (int k = 0; k < d; ++k) {
            Dot dot;
            dot.at = DotRef{t - s - rebase, s, (uint32_t)k};
            if (markers) {
                auto it = markers->find(dot.at);
                if (it != markers->end())
                    dot.marker = it->second;
            }
            spec.dots.push_back(dot);
        }
    }
    if (products)
        for (const auto& e : *products) {
            LineKind kind;
            int w;
            if (e.op == "h0") {
                kind = LineKind::H0;
                w = 1;
            }
            else if (e.op == "h1") {
                kind = LineKind::H1;
                w = 2;
            }
            else if (e.op == "h2") {
                kind = LineKind::H2;
                w = 4;
            }
            else
                continue;
            DotRef from{e.t - e.s - rebase, e.s, e.index};
            for (uint32_t k : e.targets) {
                DotRef to{e.t + w - (e.s + 1) - rebase, e.s + 1, k};
                spec.lines.push_back(Line{kind, from, to});
            }
        }
    spec.normalize();
    spec.validate();
    return spec;
}

inline std::string emit_tsv(const ChartSpec& spec)
{
    std::ostringstream out;
    for (const auto& d : spec.dots)
        out << "dot\t" << d.at.stem << "\t" << d.at.s << "\t" << d.at.index << "\t"
            << marker_name(d.marker) << "\n";
    for (const auto& l : spec.lines)
        out << "line\t" << line_kind_name(l.kind) << "\t" << l.from.stem << "\t" << l.from.s
            << "\t" << l.from.index << "\t" << l.to.stem << "\t" << l.to.s << "\t" << l.to.index
            << "\n";
    for (const auto& d : spec.differentials)
        out << "diff\t" << d.page << "\t" << d.from.stem << "\t" << d.from.s << "\t"
            << d.from.index << "\t" << d.to.stem << "\t" << d.to.s << "\t" << d.to.index << "\n";
    return out.str();
}

inline ChartSpec parse_tsv(const std::string& text)
{
    ChartSpec spec;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "dot") {
            Dot d;
            std::string marker;
            if (!(ls >> d.at.stem >> d.at.s >> d.at.index >> marker))
                throw ComputeError("bad chart dot line: " + line);
            auto m = parse_marker(marker);
            if (!m.has_value())
                throw ComputeError("bad marker: " + marker);
            d.marker = *m;
            spec.dots.push_back(d);
        }
        else if (kind == "line") {
            Line l;
            std::string lk;
            if (!(ls >> lk >> l.from.stem >> l.from.s >> l.from.index >> l.to.stem >> l.to.s >>
                  l.to.index))
                throw ComputeError("bad chart line: " + line);
            auto k = parse_line_kind(lk);
            if (!k.has_value())
                throw ComputeError("bad line kind: " + lk);
            l.kind = *k;
            spec.lines.push_back(l);
        }
        else if (kind == "diff") {
            DifferentialArrow d;
            if (!(ls >> d.page >> d.from.stem >> d.from.s >> d.from.index >> d.to.stem >> d.to.s >>
                  d.to.index))
                throw ComputeError("bad chart diff line: " + line);
            spec.differentials.push_back(d);
        }
        else
            throw ComputeError("unknown chart record: " + kind);
    }
    spec.normalize();
    return spec;
}

// Fixed-grid SVG 1.1: one stem per column, integer coordinates only.
inline std::string emit_svg(const ChartSpec& spec)
{
    int stem_min = 0, stem_max = 0, s_max = 0;
    for (const auto& d : spec.dots) {
        stem_min = std::min(stem_min, d.at.stem);
        stem_max = std::max(stem_max, d.at.stem);
        s_max = std::max(s_max, d.at.s);
    }
    const int cell = 18, margin = 30;
    int width = margin * 2 + (stem_max - stem_min + 1) * cell;
    int height = margin * 2 + (s_max + 1) * cell;

    std::map<std::pair<int, int>, int> per_cell;
    for (const auto& d : spec.dots)
        per_cell[{d.at.stem, d.at.s}]++;
    auto pos = [&](const DotRef& r) {
        int count = per_cell[{r.stem, r.s}];
        int x = margin + (r.stem - stem_min) * cell + cell / 2 + (int)r.index * 6 -
                ((count - 1) * 6) / 2;
        int y = height - margin - r.s * cell - cell / 2;
        return std::make_pair(x, y);
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    // grid ticks every 5 stems / filtrations
    for (int stem = stem_min; stem <= stem_max; ++stem)
        if (stem % 5 == 0) {
            int x = margin + (stem - stem_min) * cell + cell / 2;
            out << "<text x=\"" << x << "\" y=\"" << height - 8
                << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"gray\">" << stem
                << "</text>\n";
        }
    for (int s = 0; s <= s_max; ++s)
        if (s % 5 == 0) {
            int y = height - margin - s * cell - cell / 2;
            out << "<text x=\"10\" y=\"" << y + 3
                << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"gray\">" << s << "</text>\n";
        }
    for (const auto& l : spec.lines) {
        auto [x1, y1] = pos(l.from);
        auto [x2, y2] = pos(l.to);
        const char* color = l.kind == LineKind::V1Period ? "#888888" : "#000000";
        out << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
            << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
    }
    for (const auto& d : spec.differentials) {
        auto [x1, y1] = pos(d.from);
        auto [x2, y2] = pos(d.to);
        out << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
            << "\" stroke=\"#cc0000\" stroke-width=\"1\" stroke-dasharray=\"3,2\"/>\n";
    }
    for (const auto& d : spec.dots) {
        auto [x, y] = pos(d.at);
        switch (d.marker) {
            case Marker::Filled:
                out << "<circle cx=\"" << x << "\" cy=\"" << y
                    << "\" r=\"3\" fill=\"black\"/>\n";
                break;
            case Marker::Open:
                out << "<circle cx=\"" << x << "\" cy=\"" << y
                    << "\" r=\"3\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";
                break;
            case Marker::Box:
                out << "<rect x=\"" << x - 3 << "\" y=\"" << y - 3
                    << "\" width=\"6\" height=\"6\" fill=\"white\" stroke=\"black\" "
                       "stroke-width=\"1\"/>\n";
                break;
            case Marker::Diamond:
                out << "<path d=\"M " << x << " " << y - 4 << " L " << x + 4 << " " << y << " L "
                    << x << " " << y + 4 << " L " << x - 4 << " " << y
                    << " Z\" fill=\"black\"/>\n";
                break;
        }
    }
    out << "</svg>\n";
    return out.str();
}

inline std::string emit_ascii(const ChartSpec& spec)
{
    if (spec.dots.empty())
        return "(empty chart)\n";
    int stem_min = 0, stem_max = 0, s_max = 0;
    for (const auto& d : spec.dots) {
        stem_min = std::min(stem_min, d.at.stem);
        stem_max = std::max(stem_max, d.at.stem);
        s_max = std::max(s_max, d.at.s);
    }
    std::map<std::pair<int, int>, int> count;
    for (const auto& d : spec.dots)
        count[{d.at.stem, d.at.s}]++;
    std::ostringstream out;
    for (int s = s_max; s >= 0; --s) {
        out << (s % 10) << " |";
        for (int stem = stem_min; stem <= stem_max; ++stem) {
            auto it = count.find({stem, s});
            if (it == count.end())
                out << ' ';
            else if (it->second < 10)
                out << it->second;
            else
                out << '#';
        }
        out << "\n";
    }
    out << "  +";
    for (int stem = stem_min; stem <= stem_max; ++stem)
        out << '-';
    out << "\n   ";
    for (int stem = stem_min; stem <= stem_max; ++stem)
        out << (stem % 5 == 0 ? std::to_string(((stem % 10) + 10) % 10) : " ");
    out << "\n";
    return out.str();
}

inline std::string emit(const ChartSpec& spec, const std::string& format)
{
    if (format == "svg")
        return emit_svg(spec);
    if (format == "tsv")
        return emit_tsv(spec);
    if (format == "ascii")
        return emit_ascii(spec);
    throw ComputeError("unknown chart format: " + format);
}

}  // namespace extcharts::chart

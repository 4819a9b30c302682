#pragma once

// Minimal CSV emitter. Numbers use round-trip precision; absent optional
// values become empty cells.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qhe {

inline std::string csv_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_opt(std::optional<double> const& v)
{
    return v ? csv_num(*v) : std::string{};
}

class CsvWriter
{
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(std::vector<std::string> const& cols) { row(cols); }

    void row(std::vector<std::string> const& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i)
                os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

}  // namespace qhe

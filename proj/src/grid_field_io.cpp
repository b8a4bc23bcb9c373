#include "flowlab/errors.hpp"
#include "flowlab/fields.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace flowlab
{
    namespace
    {
        std::vector<double> splitNumbers(const std::string& line, const std::string& path, int lineNo)
        {
            std::vector<double> out;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
            {
                try
                {
                    std::size_t used = 0;
                    out.push_back(std::stod(cell, &used));
                    if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
                }
                catch (const std::exception&)
                {
                    throw InputError(path + ":" + std::to_string(lineNo) + ": not a number: '" + cell + "'");
                }
            }
            return out;
        }
    } // namespace

    VectorField loadGridField(const std::string& path, const Domain& support, const std::string& name)
    {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open grid field '" + path + "'");
        std::string line;
        int lineNo = 0;
        while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) ++lineNo;
        ++lineNo;
        const auto header = splitNumbers(line, path, lineNo);
        if (header.empty()) throw InputError(path + ": missing header");
        const int d = static_cast<int>(header[0]);
        if (d != header[0] || d != support.dim() || static_cast<int>(header.size()) != d + 1)
            throw InputError(path + ":" + std::to_string(lineNo) + ": header must be d,n_1,...,n_d matching the domain");

        GridSamples samples;
        std::size_t total = 1;
        for (int i = 0; i < d; ++i)
        {
            const int n = static_cast<int>(header[i + 1]);
            if (n != header[i + 1] || n < 2) throw InputError(path + ": node counts must be integers >= 2");
            samples.counts.push_back(n);
            total *= static_cast<std::size_t>(n);
        }
        samples.values.reserve(total * d);
        while (std::getline(in, line))
        {
            ++lineNo;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const auto row = splitNumbers(line, path, lineNo);
            if (static_cast<int>(row.size()) != d)
                throw InputError(path + ":" + std::to_string(lineNo) + ": expected " + std::to_string(d) + " components");
            samples.values.insert(samples.values.end(), row.begin(), row.end());
        }
        if (samples.values.size() != total * d)
            throw InputError(path + ": expected " + std::to_string(total) + " rows, got " +
                             std::to_string(samples.values.size() / d));
        return VectorField::gridSampled(name, support, std::move(samples));
    }

    void saveGridField(const std::string& path, const GridSamples& samples, int dim)
    {
        std::ofstream out(path);
        if (!out) throw InputError("cannot write grid field '" + path + "'");
        out << dim;
        for (int n : samples.counts) out << ',' << n;
        out << '\n' << std::setprecision(17);
        for (std::size_t k = 0; k < samples.values.size(); k += static_cast<std::size_t>(dim))
        {
            for (int c = 0; c < dim; ++c) out << (c ? "," : "") << samples.values[k + c];
            out << '\n';
        }
    }
} // namespace flowlab

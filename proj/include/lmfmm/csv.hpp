#pragma once

// Minimal CSV reading/writing for the CLI file formats. All numbers are
// written with 17 significant digits so files round-trip exactly.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmfmm {

struct CsvTable {
	std::vector<std::string> header;
	std::vector<std::vector<double>> rows;

	int column(const std::string& name) const {
		for (std::size_t i = 0; i < header.size(); ++i)
			if (header[i] == name) return int(i);
		throw std::runtime_error("csv: missing column '" + name + "'");
	}
};

inline CsvTable read_csv(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw std::runtime_error("csv: cannot open " + path);
	CsvTable t;
	std::string line;
	bool first = true;
	while (std::getline(in, line)) {
		if (line.empty() || line[0] == '#') continue;
		std::stringstream ss(line);
		std::string cell;
		if (first) {
			while (std::getline(ss, cell, ',')) t.header.push_back(cell);
			first = false;
			continue;
		}
		std::vector<double> row;
		while (std::getline(ss, cell, ',')) {
			try {
				row.push_back(std::stod(cell));
			} catch (...) {
				throw std::runtime_error("csv: bad number '" + cell + "' in " + path);
			}
		}
		if (row.size() != t.header.size())
			throw std::runtime_error("csv: ragged row in " + path);
		t.rows.push_back(std::move(row));
	}
	if (t.header.empty()) throw std::runtime_error("csv: empty file " + path);
	return t;
}

class CsvWriter {
public:
	explicit CsvWriter(const std::string& path) : out_(path) {
		if (!out_) throw std::runtime_error("csv: cannot write " + path);
		out_.precision(17);
	}
	void comment(const std::string& s) { out_ << "# " << s << "\n"; }
	void header(const std::vector<std::string>& names) {
		for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
		out_ << "\n";
	}
	template <typename... Ts>
	void row(Ts... vals) {
		bool first = true;
		((out_ << (first ? "" : ","), out_ << vals, first = false), ...);
		out_ << "\n";
	}

private:
	std::ofstream out_;
};

} // namespace lmfmm

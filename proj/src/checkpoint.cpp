#include "agegraph/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

#include "agegraph/errors.hpp"

namespace agegraph {

namespace {

constexpr const char* kMagic = "agckpt 1";

void write_doubles(std::ostream& out, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            uint64_t bits = std::bit_cast<uint64_t>(m(i, j));
            unsigned char buf[8];
            for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(bits >> (8 * k));
            out.write(reinterpret_cast<const char*>(buf), 8);
        }
}

void read_doubles(std::istream& in, Matrix& m, const std::string& path) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            unsigned char buf[8];
            in.read(reinterpret_cast<char*>(buf), 8);
            if (!in) throw IngestionError("checkpoint truncated: " + path);
            uint64_t bits = 0;
            for (int k = 0; k < 8; ++k) bits |= static_cast<uint64_t>(buf[k]) << (8 * k);
            m(i, j) = std::bit_cast<double>(bits);
        }
}

struct TensorHeader {
    std::string name;
    std::size_t rows;
    std::size_t cols;
};

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const std::map<std::string, std::string>& meta) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestionError("cannot open checkpoint for writing: " + path);
    out << kMagic << "\n";
    for (const auto& [key, val] : meta) {
        if (key.find_first_of(" \n") != std::string::npos ||
            val.find('\n') != std::string::npos)
            throw DomainError("checkpoint meta key/value must be single-line: " + key);
        out << "meta " << key << " " << val << "\n";
    }
    out << "tensors " << store.size() << "\n";
    for (const auto& entry : store.entries())
        out << "tensor " << entry.name << " " << entry.value.rows() << " "
            << entry.value.cols() << "\n";
    out << "end\n";
    for (const auto& entry : store.entries()) {
        write_doubles(out, entry.value);
        write_doubles(out, entry.m);
        write_doubles(out, entry.v);
    }
    if (!out) throw IngestionError("checkpoint write failed: " + path);
}

std::map<std::string, std::string> load_checkpoint(const std::string& path,
                                                   ParamStore& store) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open checkpoint: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IngestionError("empty checkpoint: " + path);
    if (line != kMagic)
        throw CompatibilityError("checkpoint version mismatch in " + path +
                                 ": expected '" + kMagic + "', found '" + line + "'");

    std::map<std::string, std::string> meta;
    std::vector<TensorHeader> headers;
    bool saw_count = false;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        if (line == "end") break;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "meta") {
            std::string key;
            ls >> key;
            std::string val;
            std::getline(ls, val);
            if (!val.empty() && val.front() == ' ') val.erase(0, 1);
            meta[key] = val;
        } else if (tag == "tensors") {
            ls >> declared;
            saw_count = true;
        } else if (tag == "tensor") {
            TensorHeader h;
            ls >> h.name >> h.rows >> h.cols;
            if (ls.fail() || h.rows == 0 || h.cols == 0)
                throw IngestionError("malformed tensor header in " + path + ": " + line);
            headers.push_back(std::move(h));
        } else {
            throw IngestionError("unrecognized checkpoint line in " + path + ": " + line);
        }
    }
    if (line != "end") throw IngestionError("checkpoint header missing 'end': " + path);
    if (!saw_count || declared != headers.size())
        throw IngestionError("checkpoint tensor count mismatch: " + path);

    if (store.size() != 0) {
        if (store.size() != headers.size())
            throw CompatibilityError("checkpoint holds " + std::to_string(headers.size()) +
                                     " tensors but model has " +
                                     std::to_string(store.size()));
        for (const auto& h : headers) {
            if (!store.has(h.name))
                throw CompatibilityError("checkpoint tensor '" + h.name +
                                         "' not present in model");
            const Matrix& cur = store.value(h.name);
            if (cur.rows() != h.rows || cur.cols() != h.cols)
                throw CompatibilityError(
                    "checkpoint tensor '" + h.name + "' has shape " +
                    std::to_string(h.rows) + "x" + std::to_string(h.cols) +
                    " but model expects " + cur.shape_str());
        }
    } else {
        for (const auto& h : headers) store.add(h.name, Matrix(h.rows, h.cols));
    }

    for (const auto& h : headers) {
        std::size_t idx = 0;
        for (; idx < store.entries().size(); ++idx)
            if (store.entries()[idx].name == h.name) break;
        auto& entry = store.entries()[idx];
        read_doubles(in, entry.value, path);
        read_doubles(in, entry.m, path);
        read_doubles(in, entry.v, path);
    }
    return meta;
}

}  // namespace agegraph

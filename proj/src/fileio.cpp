#include "hmmtag/fileio.hpp"

#include <fstream>
#include <sstream>

namespace hmmtag {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("error while writing '" + path + "'");
}

TaggedCorpus load_tagged_corpus(const std::string& path) {
    return parse_tagged(read_file(path));
}

RawCorpus load_raw_corpus(const std::string& path) {
    return parse_raw(read_file(path));
}

HmmModel load_model_file(const std::string& path) {
    return load_model(read_file(path));
}

void save_model_file(const HmmModel& model, const std::string& path) {
    write_file(path, save_model(model));
}

}  // namespace hmmtag

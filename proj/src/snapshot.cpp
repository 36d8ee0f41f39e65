#include "lmbp/snapshot.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lmbp {

namespace {

void write_particles(std::ostream& os, const ParticleSet& pset) {
    for (const auto& p : pset) {
        os << p.state[0] << ' ' << p.state[1] << ' ' << p.state[2] << ' ' << p.state[3] << ' '
           << p.weight << '\n';
    }
}

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    std::istringstream next() {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_no_;
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
                return std::istringstream(line);
            }
        }
        fail("unexpected end of snapshot");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("snapshot line " + std::to_string(line_no_) + ": " + what);
    }

    void expect_keyword(std::istringstream& line, const std::string& keyword) const {
        std::string word;
        line >> word;
        if (word != keyword) fail("expected '" + keyword + "', got '" + word + "'");
    }

    std::size_t read_count(std::istringstream& line) const {
        long long n = -1;
        if (!(line >> n) || n < 0) fail("expected a nonnegative count");
        return static_cast<std::size_t>(n);
    }

    ParticleSet read_particles(std::size_t n) {
        ParticleSet pset;
        pset.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto line = next();
            State s;
            double w = 0.0;
            if (!(line >> s[0] >> s[1] >> s[2] >> s[3] >> w)) fail("malformed particle");
            pset.push_back(s, w);
        }
        return pset;
    }

private:
    std::istream& is_;
    int line_no_ = 0;
};

}  // namespace

void write_snapshot(std::ostream& os, const FilterState& state, bool with_particles) {
    const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
    os << "time " << state.time << '\n';
    os << "tracks " << state.tracks.size() << '\n';
    for (const auto& track : state.tracks) {
        os << track.label.birth_time << ',' << track.label.index << ',' << track.existence;
        if (with_particles) {
            os << " particles " << track.pdf.size() << '\n';
            write_particles(os, track.pdf);
        } else {
            os << '\n';
        }
    }
    const std::size_t phd_count = with_particles ? state.phd.particles.size() : 0;
    os << "phd " << phd_count << '\n';
    if (with_particles) write_particles(os, state.phd.particles);
    os << "frame " << state.previous_frame.size() << '\n';
    for (const auto& z : state.previous_frame) {
        os << z.range << ' ' << z.bearing << '\n';
    }
    os.precision(old_precision);
}

FilterState read_snapshot(std::istream& is) {
    LineReader reader(is);
    FilterState state;

    auto line = reader.next();
    reader.expect_keyword(line, "time");
    if (!(line >> state.time)) reader.fail("expected step index");

    line = reader.next();
    reader.expect_keyword(line, "tracks");
    const std::size_t track_count = reader.read_count(line);
    for (std::size_t t = 0; t < track_count; ++t) {
        line = reader.next();
        BernoulliTrack track;
        char comma1 = 0;
        char comma2 = 0;
        if (!(line >> track.label.birth_time >> comma1 >> track.label.index >> comma2 >>
              track.existence) ||
            comma1 != ',' || comma2 != ',') {
            reader.fail("expected '<birth>,<index>,<existence>'");
        }
        std::string keyword;
        if (line >> keyword) {
            if (keyword != "particles") reader.fail("expected 'particles'");
            track.pdf = reader.read_particles(reader.read_count(line));
        }
        state.tracks.push_back(std::move(track));
    }

    line = reader.next();
    reader.expect_keyword(line, "phd");
    state.phd.particles = reader.read_particles(reader.read_count(line));

    line = reader.next();
    reader.expect_keyword(line, "frame");
    const std::size_t meas_count = reader.read_count(line);
    for (std::size_t m = 0; m < meas_count; ++m) {
        line = reader.next();
        Measurement z;
        if (!(line >> z.range >> z.bearing)) reader.fail("malformed measurement");
        state.previous_frame.push_back(z);
    }
    return state;
}

}  // namespace lmbp

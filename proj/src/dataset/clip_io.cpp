#include "pointing/dataset/clip_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pointing/common/error.hpp"
#include "pointing/common/text.hpp"

namespace pointing::dataset {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-empty line split into tokens; the first token must equal key.
  std::vector<std::string_view> expect(const std::string& key) {
    if (!next()) throw Error(ErrorCode::schema, "line " + std::to_string(line_no_) + ": expected '" + key + "', got EOF");
    if (tokens_.empty() || tokens_[0] != key) {
      throw Error(ErrorCode::schema, "line " + std::to_string(line_no_) + ": expected '" + key + "'");
    }
    return tokens_;
  }

  std::vector<std::string_view> row() {
    if (!next()) throw Error(ErrorCode::schema, "unexpected end of file in frame data");
    return tokens_;
  }

  int line() const { return line_no_; }

 private:
  bool next() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      tokens_ = text::split_ws(line_);
      if (!tokens_.empty()) return true;
    }
    return false;
  }

  std::istream& in_;
  std::string line_;
  std::vector<std::string_view> tokens_;
  int line_no_ = 0;
};

void require_count(const std::vector<std::string_view>& t, std::size_t n, int line) {
  if (t.size() != n) throw Error(ErrorCode::schema, "line " + std::to_string(line) + ": wrong field count");
}

}  // namespace

ClipLibrary read_library(std::istream& in, const SkeletonModel& skeleton) {
  LineReader reader(in);
  auto header = reader.expect("pointing-clips");
  require_count(header, 2, reader.line());
  if (header[1] != "1") throw Error(ErrorCode::schema, "unsupported clip format version");

  auto sk = reader.expect("skeleton");
  require_count(sk, 2, reader.line());
  if (sk[1] != skeleton.id()) {
    throw Error(ErrorCode::schema, "skeleton mismatch: file uses '" + std::string(sk[1]) + "', expected '" +
                                       skeleton.id() + "'");
  }
  auto dofs = reader.expect("dofs");
  const auto names = skeleton.dof_names();
  if (dofs.size() != names.size() + 1) throw Error(ErrorCode::schema, "skeleton mismatch: DoF count differs");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (dofs[i + 1] != names[i]) throw Error(ErrorCode::schema, "skeleton mismatch: DoF '" + names[i] + "'");
  }
  auto count_line = reader.expect("clips");
  require_count(count_line, 2, reader.line());
  const long count = text::parse_int(count_line[1]);
  if (count <= 0) throw Error(ErrorCode::empty_input, "clip library is empty");

  ClipLibrary lib{skeleton, {}};
  const int ndof = skeleton.dof_count();
  for (long c = 0; c < count; ++c) {
    MotionClip clip;
    auto id = reader.expect("clip");
    require_count(id, 2, reader.line());
    clip.source_id = std::string(id[1]);
    auto fps = reader.expect("fps");
    require_count(fps, 2, reader.line());
    clip.fps = text::parse_double(fps[1]);
    auto hand = reader.expect("handedness");
    require_count(hand, 2, reader.line());
    clip.handedness = motion::handedness_from_string(std::string(hand[1]));
    auto target = reader.expect("target");
    if (target.size() == 2 && target[1] == "none") {
      clip.target.reset();
    } else {
      require_count(target, 4, reader.line());
      clip.target = deixis::TargetPoint(text::parse_double(target[1]), text::parse_double(target[2]),
                                        text::parse_double(target[3]));
    }
    auto mirrored = reader.expect("mirrored");
    require_count(mirrored, 2, reader.line());
    clip.is_mirrored = text::parse_int(mirrored[1]) != 0;
    auto part = reader.expect("partition");
    require_count(part, 2, reader.line());
    clip.partition = std::string(part[1]);
    auto frames = reader.expect("frames");
    require_count(frames, 2, reader.line());
    const long nframes = text::parse_int(frames[1]);
    if (nframes < 0) throw Error(ErrorCode::schema, "clip '" + clip.source_id + "': negative frame count");
    for (long f = 0; f < nframes; ++f) {
      auto row = reader.row();
      if (row.size() != static_cast<std::size_t>(7 + ndof)) {
        throw Error(ErrorCode::schema, "clip '" + clip.source_id + "' frame " + std::to_string(f) +
                                           ": expected " + std::to_string(7 + ndof) + " values");
      }
      JointState s;
      s.root_position = Vec3(text::parse_double(row[0]), text::parse_double(row[1]), text::parse_double(row[2]));
      s.root_orientation = motion::Quat(text::parse_double(row[3]), text::parse_double(row[4]),
                                        text::parse_double(row[5]), text::parse_double(row[6]));
      s.q.resize(ndof);
      for (int d = 0; d < ndof; ++d) s.q[d] = text::parse_double(row[static_cast<std::size_t>(7 + d)]);
      s.qdot = Eigen::VectorXd::Zero(ndof);
      clip.frames.push_back(std::move(s));
    }
    reader.expect("end");
    clip.validate(skeleton);
    fill_velocities(clip);
    lib.clips.push_back(std::move(clip));
  }
  return lib;
}

ClipLibrary load_library(const std::string& path, const SkeletonModel& skeleton) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open clip library " + path);
  return read_library(in, skeleton);
}

void write_library(std::ostream& out, const ClipLibrary& library) {
  using text::format_double;
  out << "pointing-clips 1\n";
  out << "skeleton " << library.skeleton.id() << "\n";
  out << "dofs";
  for (const auto& n : library.skeleton.dof_names()) out << ' ' << n;
  out << "\nclips " << library.clips.size() << "\n";
  for (const auto& clip : library.clips) {
    out << "clip " << clip.source_id << "\n";
    out << "fps " << format_double(clip.fps) << "\n";
    out << "handedness " << motion::to_string(clip.handedness) << "\n";
    if (clip.target) {
      out << "target " << format_double(clip.target->x()) << ' ' << format_double(clip.target->y()) << ' '
          << format_double(clip.target->z()) << "\n";
    } else {
      out << "target none\n";
    }
    out << "mirrored " << (clip.is_mirrored ? 1 : 0) << "\n";
    out << "partition " << clip.partition << "\n";
    out << "frames " << clip.frames.size() << "\n";
    for (const auto& f : clip.frames) {
      out << format_double(f.root_position.x()) << ' ' << format_double(f.root_position.y()) << ' '
          << format_double(f.root_position.z()) << ' ' << format_double(f.root_orientation.w()) << ' '
          << format_double(f.root_orientation.x()) << ' ' << format_double(f.root_orientation.y()) << ' '
          << format_double(f.root_orientation.z());
      for (int d = 0; d < f.q.size(); ++d) out << ' ' << format_double(f.q[d]);
      out << "\n";
    }
    out << "end\n";
  }
}

void save_library(const std::string& path, const ClipLibrary& library) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::io, "cannot write clip library " + path);
    write_library(out, library);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorCode::io, "cannot move " + tmp + " to " + path);
}

}  // namespace pointing::dataset

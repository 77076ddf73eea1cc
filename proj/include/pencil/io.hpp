#pragma once

// Line-oriented file formats (pencil, transforms, structure spec) and the
// JSON ground-truth sidecar.  Expression strings are double-quoted; '#'
// starts a comment.

#include <optional>
#include <string>
#include <utility>

#include "pencil/generate.hpp"
#include "pencil/pencil.hpp"
#include "pencil/tolerances.hpp"

namespace pencil {

struct PencilFile {
  Pencil pencil;
  std::optional<double> shift;   // forced constant shift
  Tolerances tol;
};

PencilFile read_pencil_file(const std::string& path);
PencilFile parse_pencil_text(const std::string& text, const std::string& origin);
void write_pencil_file(const std::string& path, const Pencil& p);
std::string pencil_to_text(const Pencil& p);

struct TransformsFile {
  MatrixFunction p, q;
  std::optional<std::pair<MatrixFunction, MatrixFunction>> target;
};

TransformsFile read_transforms_file(const std::string& path, int var_count);

struct StructureFile {
  StructureSpec spec;
  Box domain;
  std::vector<int> grid_counts;
};

StructureFile read_structure_file(const std::string& path);

std::string truth_sidecar_json(const GeneratedInstance& inst);
GeneratedInstance read_truth_sidecar(const std::string& path,
                                     const Pencil& pencil);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace pencil

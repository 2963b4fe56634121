/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef IHMBENCH_H
#define IHMBENCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IhmStatus {
  IHM_STATUS_OK = 0,
  IHM_STATUS_NULL_ARGUMENT = 1,
  IHM_STATUS_INVALID_ARGUMENT = 2,
  // The mesh file could not be read or parsed.
  IHM_STATUS_MESH_LOAD = 3,
  // A geometric query failed, e.g. no contact or disconnected vertices.
  IHM_STATUS_GEOMETRY = 4,
  IHM_STATUS_INTERNAL = 5,
} IhmStatus;

typedef enum IhmGeodesicMethod {
  IHM_GEODESIC_METHOD_EDGE_DIJKSTRA = 0,
  IHM_GEODESIC_METHOD_STEINER_REFINED = 1,
} IhmGeodesicMethod;

typedef enum IhmContactMetric {
  IHM_CONTACT_METRIC_EUCLIDEAN = 0,
  IHM_CONTACT_METRIC_GEODESIC = 1,
} IhmContactMetric;

typedef struct IhmGeodesicSolver IhmGeodesicSolver;

// Triangle mesh, lengths in meters.
typedef struct IhmMesh IhmMesh;

// Box-plot summary. Outliers are returned separately.
typedef struct IhmBoxStats {
  size_t n;
  double median;
  double q1;
  double q3;
  double whisker_low;
  double whisker_high;
  size_t outlier_count;
} IhmBoxStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a
// successful call. Valid until the next call on the same thread.
const char *ihm_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ihm_version(void);

// Loads an OBJ, PLY or STL file (format from the extension) and scales it
// by `units` meters per file unit.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable pointer.
enum IhmStatus ihm_mesh_load(const char *path, double units, struct IhmMesh **out);

// Builds a mesh from `vertex_count` xyz triples and `face_count` index
// triples (zero-based).
//
// # Safety
// `xyz` must hold `3 * vertex_count` doubles and `faces` `3 * face_count`
// indices.
enum IhmStatus ihm_mesh_from_arrays(const double *xyz,
                                    size_t vertex_count,
                                    const uint32_t *faces,
                                    size_t face_count,
                                    struct IhmMesh **out);

// Copy of `mesh` placed by `pose` = [x, y, z, qw, qx, qy, qz].
//
// # Safety
// `pose` must point to 7 doubles.
enum IhmStatus ihm_mesh_transformed(const struct IhmMesh *mesh,
                                    const double *pose,
                                    struct IhmMesh **out);

// # Safety
// `mesh` must come from this library and not be used afterwards. Null is ignored.
void ihm_mesh_free(struct IhmMesh *mesh);

// Zero for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
size_t ihm_mesh_vertex_count(const struct IhmMesh *mesh);

// Zero for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
size_t ihm_mesh_face_count(const struct IhmMesh *mesh);

// Smallest distance between two distinct vertices, meters.
//
// # Safety
// `mesh` must be a live handle and `out` writable.
enum IhmStatus ihm_mesh_g_min(const struct IhmMesh *mesh, double *out);

// # Safety
// `mesh` must be a live handle and `out` writable. The solver copies what it
// needs; the mesh may be freed afterwards.
enum IhmStatus ihm_geodesic_solver_new(const struct IhmMesh *mesh,
                                       enum IhmGeodesicMethod method,
                                       struct IhmGeodesicSolver **out);

// Surface distance between vertices `a` and `b`, meters.
//
// # Safety
// `solver` must be a live handle and `out` writable.
enum IhmStatus ihm_geodesic_distance(const struct IhmGeodesicSolver *solver,
                                     size_t a,
                                     size_t b,
                                     double *out);

// # Safety
// `solver` must come from this library and not be used afterwards. Null is ignored.
void ihm_geodesic_solver_free(struct IhmGeodesicSolver *solver);

// Largest distance from a vertex touched by `links` to the closest vertex
// under `region`, both projected onto `object`. Meters.
//
// # Safety
// `links` must hold `link_count` live mesh handles.
enum IhmStatus ihm_contact_region_error(const struct IhmMesh *object,
                                        const struct IhmMesh *const *links,
                                        size_t link_count,
                                        const struct IhmMesh *region,
                                        enum IhmContactMetric metric,
                                        double tolerance,
                                        double *out);

// Euclidean distance between desired and reached positions.
//
// # Safety
// `s_d` and `s_r` must point to 3 doubles.
enum IhmStatus ihm_position_error(const double *s_d, const double *s_r, double *out);

// Position error as a percentage of the initial-to-desired distance.
//
// # Safety
// `s_i`, `s_d` and `s_r` must point to 3 doubles.
enum IhmStatus ihm_position_error_pct(const double *s_i,
                                      const double *s_d,
                                      const double *s_r,
                                      double *out);

// Orientation error percentage between two quaternions given as
// [w, x, y, z]. Inputs are normalized.
//
// # Safety
// `q_d` and `q_r` must point to 4 doubles.
enum IhmStatus ihm_orientation_error_pct(const double *q_d, const double *q_r, double *out);

// Box-plot statistics of `n` samples. Up to `outlier_capacity` outliers are
// copied to `outliers` in ascending order; `out->outlier_count` holds the
// full count.
//
// # Safety
// `samples` must hold `n` doubles and `outliers` room for
// `outlier_capacity` (may be null when that is 0).
enum IhmStatus ihm_box_stats(const double *samples,
                             size_t n,
                             struct IhmBoxStats *out,
                             double *outliers,
                             size_t outlier_capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IHMBENCH_H */

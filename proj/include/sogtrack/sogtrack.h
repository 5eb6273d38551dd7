/* Sum-of-Gaussians object-pose tracking, C interface.
 *
 * All functions return SOGTRACK_OK on success; on failure they return an
 * error code and sogtrack_last_error() carries a thread-local message.
 * Handles are opaque; every *_open/*_create has a matching *_close.
 */
#ifndef SOGTRACK_H
#define SOGTRACK_H

#include <stddef.h>

#if defined(_WIN32)
#define SOGTRACK_API __declspec(dllexport)
#else
#define SOGTRACK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sogtrack_status {
  SOGTRACK_OK = 0,
  SOGTRACK_ERROR = 1,            /* operation failed; see sogtrack_last_error */
  SOGTRACK_INVALID_ARGUMENT = 2, /* null handle or out-of-range argument */
  SOGTRACK_BUFFER_TOO_SMALL = 3  /* output buffer shorter than required */
} sogtrack_status;

SOGTRACK_API const char* sogtrack_version(void);
SOGTRACK_API const char* sogtrack_last_error(void);

/* Default configuration as a JSON document. `required` receives the full
 * length including the terminator; `buffer` may be NULL to query the size. */
SOGTRACK_API sogtrack_status sogtrack_default_config(char* buffer, size_t capacity,
                                                     size_t* required);

typedef struct sogtrack_sequence sogtrack_sequence;
typedef struct sogtrack_trajectory sogtrack_trajectory;

SOGTRACK_API sogtrack_status sogtrack_sequence_open(const char* manifest_path,
                                                    sogtrack_sequence** out);
SOGTRACK_API void sogtrack_sequence_close(sogtrack_sequence* seq);
SOGTRACK_API sogtrack_status sogtrack_sequence_frame_count(const sogtrack_sequence* seq,
                                                           int* out);

/* Runs tracking. `config_json` overrides defaults when non-NULL (partial
 * documents allowed). When `diagnostics_dir` is non-NULL, per-window
 * objective-trace CSVs are written there. */
SOGTRACK_API sogtrack_status sogtrack_track(const sogtrack_sequence* seq,
                                            const char* config_json,
                                            const char* diagnostics_dir,
                                            sogtrack_trajectory** out);

SOGTRACK_API sogtrack_status sogtrack_trajectory_open(const char* path,
                                                      sogtrack_trajectory** out);
SOGTRACK_API sogtrack_status sogtrack_trajectory_save(const sogtrack_trajectory* traj,
                                                      const char* path);
SOGTRACK_API void sogtrack_trajectory_close(sogtrack_trajectory* traj);
SOGTRACK_API sogtrack_status sogtrack_trajectory_frame_count(const sogtrack_trajectory* traj,
                                                             int* out);
/* Object pose of one frame: quaternion (w, x, y, z), translation, scale. */
SOGTRACK_API sogtrack_status sogtrack_trajectory_object_pose(const sogtrack_trajectory* traj,
                                                             int frame, double quat_wxyz[4],
                                                             double translation[3],
                                                             double* scale);

/* Evaluates `pred` against the ground-truth trajectory file and writes the
 * metric report JSON to `report_path`. */
SOGTRACK_API sogtrack_status sogtrack_evaluate(const sogtrack_sequence* seq,
                                               const sogtrack_trajectory* pred,
                                               const char* gt_trajectory_path,
                                               const char* report_path);

/* Generates a synthetic sequence from a JSON spec (NULL for defaults) into
 * out_dir; writes the manifest path into the buffer when provided. */
SOGTRACK_API sogtrack_status sogtrack_synth(const char* spec_json, const char* out_dir,
                                            char* manifest_path, size_t capacity);

/* Keyframe selection over a feature file. mode: "greedy", "brute", "random".
 * `indices` receives up to `capacity` sorted frame indices; `count` the
 * selected number. */
SOGTRACK_API sogtrack_status sogtrack_keyframes(const char* features_path, int k,
                                                double lambda_div, const char* mode,
                                                unsigned long long seed, int* indices,
                                                size_t capacity, size_t* count);

/* Renders per-frame overlays of the projected object model into out_dir. */
SOGTRACK_API sogtrack_status sogtrack_overlay(const sogtrack_sequence* seq,
                                              const sogtrack_trajectory* traj,
                                              const char* config_json, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* SOGTRACK_H */

//! Builds a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "elashift.h"

int main(void) {
    enum { S = 30, D = 4, d = 2 };
    double x[S * D], z[S * d], y[S], delta[61];
    ElashiftInstance *inst = NULL;
    ElashiftEmbedding *emb = NULL;
    ElashiftFeatures *ref = NULL, *prj = NULL;

    if (elashift_instance_new(99, 0, D, &inst) != ELASHIFT_STATUS_DOMAIN) return 10;
    if (strlen(elashift_last_error()) == 0) return 11;

    if (elashift_lhs(S, D, 3, x, S * D) != ELASHIFT_STATUS_OK) return 1;
    if (elashift_instance_new(10, 2, D, &inst) != ELASHIFT_STATUS_OK) return 2;
    for (int i = 0; i < S; i++)
        if (elashift_instance_evaluate(inst, x + i * D, D, y + i) != ELASHIFT_STATUS_OK) return 3;
    if (elashift_embedding_new(d, D, 8, &emb) != ELASHIFT_STATUS_OK) return 4;
    if (elashift_embedding_project(emb, x, S, D, z, S * d) != ELASHIFT_STATUS_OK) return 5;
    if (elashift_features_compute(x, S, D, y, 1, &ref) != ELASHIFT_STATUS_OK) return 6;
    if (elashift_features_compute(z, S, d, y, 1, &prj) != ELASHIFT_STATUS_OK) return 7;
    if (elashift_feature_shift(prj, ref, delta, 61) != ELASHIFT_STATUS_OK) return 8;
    if (delta[0] != 0.0) return 9;
    printf("%s %zu\n", elashift_feature_name(0), elashift_feature_count());

    elashift_features_free(ref);
    elashift_features_free(prj);
    elashift_embedding_free(emb);
    elashift_instance_free(inst);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<this test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libelashift_ffi.a");
    assert!(lib.is_file(), "static library missing at {}", lib.display());
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("consumer");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-I", include])
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap_or_else(|e| panic!("cannot run C compiler `{cc}`: {e}"));
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "consumer exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ela_distr.skewness 61");
}

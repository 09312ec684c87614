//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "lipbox.h"

int main(int argc, char **argv) {
    FILE *f = fopen(argv[1], "rb");
    if (!f) return 10;
    static char json[1 << 16];
    size_t n = fread(json, 1, sizeof json - 1, f);
    fclose(f);
    json[n] = 0;

    LipboxInstance *inst = NULL;
    if (lipbox_instance_from_json(json, NULL, &inst) != LIPBOX_STATUS_OK) return 11;
    char *value = NULL;
    if (lipbox_norm(inst, LIPBOX_NORM_FREE, "a+b", &value, NULL) != LIPBOX_STATUS_OK) return 12;
    printf("free %s\n", value);
    lipbox_string_free(value);

    LipboxStatus s = lipbox_norm(inst, LIPBOX_NORM_LIPL, "missing", NULL, NULL);
    printf("status %d error %s\n", (int)s, lipbox_last_error() ? "set" : "unset");
    lipbox_instance_free(inst);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("liblipbox_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("main.c");
    let exe = work.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let out = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("C compiler available");
    assert!(out.status.success(), "compile failed:\n{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).arg(crate_dir.join("../core/instances/x3.json")).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "exit {:?}: {stdout}", run.status);
    assert_eq!(stdout, "free 3/1\nstatus 2 error set\n");
}

#[test]
fn header_is_valid_cpp() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = Command::new("c++")
        .args(["-fsyntax-only", "-x", "c++", "-Wall", "-Werror"])
        .arg(crate_dir.join("include/lipbox.h"))
        .output()
        .expect("C++ compiler available");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

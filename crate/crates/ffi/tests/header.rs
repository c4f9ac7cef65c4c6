use std::path::Path;
use std::process::Command;

const ENTRY_POINTS: [&str; 14] = [
    "ebfvm_version",
    "ebfvm_last_error",
    "ebfvm_case_reference",
    "ebfvm_case_parse",
    "ebfvm_case_load",
    "ebfvm_case_set_coupling",
    "ebfvm_case_set_mesh",
    "ebfvm_case_free",
    "ebfvm_run",
    "ebfvm_results_free",
    "ebfvm_results_node_count",
    "ebfvm_results_field",
    "ebfvm_results_equilibrium",
    "ebfvm_results_converged",
];

fn header() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ebfvm.h")
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in ENTRY_POINTS.iter().chain(&["ebfvm_results_write"]) {
        assert!(h.contains(&format!("{name}(")), "{name} missing");
    }
    assert!(h.contains("typedef struct EbfvmCase EbfvmCase;"));
    assert!(h.contains("EBFVM_STATUS_NOT_CONVERGED = 5"));
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::TempDir::new().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"ebfvm.h\"\nint f(void) { EbfvmCase *c = 0; EbfvmStatus s = ebfvm_case_reference(&c); ebfvm_case_free(c); return (int)s; }\n",
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .output()
        .expect("a C compiler on PATH");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR");
    let out = std::path::Path::new(&crate_dir).join("include").join("renorm_julia.h");

    let config = cbindgen::Config {
        language: cbindgen::Language::C,
        include_guard: Some("RENORM_JULIA_H".into()),
        cpp_compat: true,
        documentation: true,
        ..Default::default()
    };

    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("unable to generate C bindings")
        .write_to_file(out);

    println!("cargo:rerun-if-changed=src/lib.rs");
}

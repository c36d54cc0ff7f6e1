fn main() {
    freud_sobolev::cli::run();
}

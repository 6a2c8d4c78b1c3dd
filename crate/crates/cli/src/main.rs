fn main() {
    std::process::exit(prismalab::app::main_from_env());
}

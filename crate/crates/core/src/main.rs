fn main() { std::process::exit(thetafact::cli::main()) }

pub mod quadrature; pub mod roots;

# Test Utilities Package
# Instance builders and brute-force oracles

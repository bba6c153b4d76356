"""totient-pell - 2^α 5^β 型整数上 n*phi(n) = 2 (mod sigma(n)) 的机器验证"""

import sys

__version__ = "0.1.0"

# 证书与见证中的整数可能超过默认的十进制转换位数上限
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

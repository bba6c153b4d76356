"""数论层 - 整数算术、连分数、Pell 判定与候选搜索"""

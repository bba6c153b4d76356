"""服务层 - 用例编排"""
